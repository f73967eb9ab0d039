from .bpe import SubwordVocab, train_bpe
from .model import (
    Encoder,
    EncoderConfig,
    EncoderError,
    MaskedLMModel,
    embed_occurrence,
    gradient_check,
    load_encoder,
    mlm_loss,
    save_encoder,
    train_encoder,
)
from .represent import build_representation
from .sampling import (
    OccurrenceSample,
    SamplingError,
    load_samples,
    sample_occurrences,
    save_samples,
    token_streams,
)

__all__ = [
    "SubwordVocab", "train_bpe",
    "Encoder", "EncoderConfig", "EncoderError", "MaskedLMModel",
    "embed_occurrence", "gradient_check", "load_encoder", "mlm_loss",
    "save_encoder", "train_encoder",
    "build_representation",
    "OccurrenceSample", "SamplingError", "load_samples",
    "sample_occurrences", "save_samples", "token_streams",
]
