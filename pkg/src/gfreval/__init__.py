"""Group fairness and relevance evaluation of ranked lists."""

from .core import (
    AttributeSet,
    Distribution,
    IntentSet,
    MembershipTable,
    Qrels,
    Run,
    Scale,
    TopicIntents,
    achieved_distribution,
    exponential_gain,
    membership_from_bias,
    membership_from_intent_gains,
    resolve_membership,
)
from .divergence import DivergenceKind, distr_sim, jsd, kld, nmd, rnod
from .errors import DomainError, EvaluationError, FormatError, UndefinedMeasureError
from .measures import GfConfig, TopicScore, delta_gf, gf, gfr, gfr_integrated, intersectional_score, relevance_score
from .stats import ScoreMatrix, disc_power_curve, kendall_tau, randomised_tukey_hsd, tau_ci
from .user_model import DecayKind, UtilityKind, err_decay_sequence, rbp_decay_sequence, rel_prob, utility

__version__ = "0.1.0"

__all__ = [
    "AttributeSet",
    "DecayKind",
    "Distribution",
    "DivergenceKind",
    "DomainError",
    "EvaluationError",
    "FormatError",
    "GfConfig",
    "IntentSet",
    "MembershipTable",
    "Qrels",
    "Run",
    "Scale",
    "ScoreMatrix",
    "TopicIntents",
    "TopicScore",
    "UndefinedMeasureError",
    "UtilityKind",
    "achieved_distribution",
    "delta_gf",
    "disc_power_curve",
    "distr_sim",
    "err_decay_sequence",
    "exponential_gain",
    "gf",
    "gfr",
    "gfr_integrated",
    "intersectional_score",
    "jsd",
    "kendall_tau",
    "kld",
    "membership_from_bias",
    "membership_from_intent_gains",
    "nmd",
    "randomised_tukey_hsd",
    "rbp_decay_sequence",
    "rel_prob",
    "relevance_score",
    "resolve_membership",
    "rnod",
    "tau_ci",
    "utility",
]
