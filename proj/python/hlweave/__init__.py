from ._hlweave import (
    AdviceError,
    Error,
    QueryError,
    SyntaxError,
    cli,
    dump_xml,
    format,
    run,
    weave,
)

__all__ = ["AdviceError", "Error", "QueryError", "SyntaxError", "cli", "dump_xml", "format", "run", "weave"]
