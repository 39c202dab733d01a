"""
Services package for the DWSL engine.

Each subpackage implements one stage of the pipeline: environments, data
collection, relabeling, networks, distance models, policies, verification
oracles and evaluation.
"""

__all__ = [
    "mdp",
    "datagen",
    "relabel",
    "nn",
    "distance",
    "policy",
    "oracle",
    "evaluation",
]
