from clonelog.lm.decode import Candidate, generate, next_token_distribution, sequence_logprob, suggest_lsd
from clonelog.lm.ngram import NgramModel, train_ngram
from clonelog.lm.recurrent import PROFILES, LmHyperparams, RecurrentModel, train_recurrent

__all__ = [
    "Candidate",
    "LmHyperparams",
    "NgramModel",
    "PROFILES",
    "RecurrentModel",
    "generate",
    "next_token_distribution",
    "sequence_logprob",
    "suggest_lsd",
    "train_ngram",
    "train_recurrent",
]
