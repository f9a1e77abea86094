from .categories import (
    CategoryDifference,
    CategoryLexicon,
    CategoryProfile,
    DictionaryError,
    compare_classes,
    load_category_lexicon,
    parse_category_dictionary,
    profile,
)
from .crowd import (
    NO_CONSENSUS,
    JudgementRecord,
    Rating,
    agreement,
    distribution,
    export_hits,
    import_judgements,
    majority_vote,
)
from .stats import TTestResult, welch_t_test

__all__ = [
    "CategoryDifference", "CategoryLexicon", "CategoryProfile", "DictionaryError", "compare_classes",
    "load_category_lexicon", "parse_category_dictionary", "profile", "NO_CONSENSUS", "JudgementRecord",
    "Rating", "agreement", "distribution", "export_hits", "import_judgements", "majority_vote",
    "TTestResult", "welch_t_test",
]
