"""Semantic similarity and MC-dropout uncertainty for clinical reports.

The heavy lifting lives in the compiled ``_reportcert`` extension; this
package re-exports its public surface.
"""

from reportcert._reportcert import (  # noqa: F401
    EmbeddedSentence,
    ReconstructionStack,
    Report,
    ReportcertError,
    Sentence,
    SentenceUncertainty,
    SentenceVectorSource,
    UncertaintyReport,
    WordVectorStore,
    __version__,
    adjusted_bleu4,
    cosine_distance,
    embed_words,
    evaluate_case,
    match,
    pearson,
    read_stack,
    rep_weight,
    report_bleu4,
    report_wrs,
    segment,
    sen_weight,
    sentence_bleu4,
    smas,
    solve_transport,
    vis_summary,
    weighted_batch_loss,
    wrd,
    write_stack,
    wrs,
)

__all__ = [
    "EmbeddedSentence",
    "ReconstructionStack",
    "Report",
    "ReportcertError",
    "Sentence",
    "SentenceUncertainty",
    "SentenceVectorSource",
    "UncertaintyReport",
    "WordVectorStore",
    "__version__",
    "adjusted_bleu4",
    "cosine_distance",
    "embed_words",
    "evaluate_case",
    "match",
    "pearson",
    "read_stack",
    "rep_weight",
    "report_bleu4",
    "report_wrs",
    "segment",
    "sen_weight",
    "sentence_bleu4",
    "smas",
    "solve_transport",
    "vis_summary",
    "weighted_batch_loss",
    "wrd",
    "write_stack",
    "wrs",
]
