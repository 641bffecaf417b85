from .classes import (
    MAX_ENUMERATION,
    ClassKind,
    GraphClassDescriptor,
    contains,
    count_class,
    describe,
    enumerate_class,
    is_member,
    parse_kind,
    prufer_decode,
    rooted_code_decode,
    sample_class,
)
from .core import (
    ClassificationReport,
    GraphSequence,
    LabeledDigraph,
    classify,
    directed_path,
    empty_graph,
    full_mask,
    make_graph,
    mask_of,
    nodes_of,
    star,
    undirected_path,
)
from .io import (
    SequenceParseError,
    dumps_sequence,
    graph_from_dict,
    graph_to_dict,
    loads_sequence,
    read_sequence,
    sequence_to_dot,
    to_dot,
    write_sequence,
)

__all__ = [
    "MAX_ENUMERATION",
    "ClassKind",
    "ClassificationReport",
    "GraphClassDescriptor",
    "GraphSequence",
    "LabeledDigraph",
    "SequenceParseError",
    "classify",
    "contains",
    "count_class",
    "describe",
    "directed_path",
    "dumps_sequence",
    "empty_graph",
    "enumerate_class",
    "full_mask",
    "graph_from_dict",
    "graph_to_dict",
    "is_member",
    "loads_sequence",
    "make_graph",
    "mask_of",
    "nodes_of",
    "parse_kind",
    "prufer_decode",
    "read_sequence",
    "rooted_code_decode",
    "sample_class",
    "sequence_to_dot",
    "star",
    "to_dot",
    "undirected_path",
    "write_sequence",
]
