"""Fault-tree inference from labeled binary failure data."""

from ._core import (
    FailureDataset,
    FaultTree,
    FtError,
    ObjectiveVector,
    RunResult,
    csd_tree,
    extract_mcs_from_data,
    generate_dataset,
    generate_exhaustive,
    infer,
    inject_superfluous,
    parse_csv,
    parse_ft,
    phi_c,
    phi_d,
    serialize_ft,
)

__all__ = [
    "FailureDataset",
    "FaultTree",
    "FtError",
    "ObjectiveVector",
    "RunResult",
    "csd_tree",
    "extract_mcs_from_data",
    "generate_dataset",
    "generate_exhaustive",
    "infer",
    "inject_superfluous",
    "parse_csv",
    "parse_ft",
    "phi_c",
    "phi_d",
    "serialize_ft",
]
