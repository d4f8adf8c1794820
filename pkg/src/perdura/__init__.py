"""Perdurantist (4D) ontology engineering toolkit.

Object Paradigm store with extensional identity, BORO classification,
ORM fact-table parsing, ORM -> OP re-engineering, temporal queries and
construct-quality linting.
"""

__version__ = "0.1.0"
