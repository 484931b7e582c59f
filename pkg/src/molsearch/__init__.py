"""molsearch: language-model-guided evolutionary search over molecules.

A self-contained molecular graph core (parsing, canonical form, matching,
edits, fingerprints), a descriptor stack, a typed rule expression language,
pluggable proposal providers, a tree-search engine with reproducible traces,
prediction/optimization task harnesses, and small-space analysis tools.
"""

__version__ = "0.1.0"
