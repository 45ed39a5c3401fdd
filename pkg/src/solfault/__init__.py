"""Fault injection and dependability assessment for smart contracts.

Pipeline: parse a contract family, enumerate fault-operator injection sites,
materialize single-fault mutants, execute reference and mutants on a
deterministic ledger VM under a shared workload, and classify each mutant's
divergence (abort / gas / reliability / integrity / latent / ineffective)
plus the detection-funnel stage that first caught it.
"""

__version__ = "0.1.0"
