"""Labeled natural deduction for linear temporal logic with a history operator.

Subpackages: formula ASTs and parsing (``formulas``), the until-to-history
translation (``translate``), lasso-model semantics (``semantics``), the
trusted proof checker (``kernel``), derivation scripts (``scripts``),
derived rules and proof transformers (``derived``), the bundled axiom
corpus (``corpus``), lemma fuzzing (``fuzz``) and the ``nabla`` CLI
(``cli``).
"""

__version__ = "0.1.0"
