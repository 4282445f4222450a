"""SPARQL-subset parsing and evaluation."""

from .ast import Query
from .evaluate import ResultTable, execute
from .parser import QueryError, parse_query
from .results import FORMATS, serialize_results

__all__ = ["FORMATS", "Query", "QueryError", "ResultTable", "execute", "parse_query", "serialize_results"]
