"""Scoring models: a segment encoder against per-candidate representations.

Three conditions share one architecture:

* ``no_history``      sigmoid( <seg, normalize(relu(W @ feature))> )
* ``history``         candidate = normalize(relu(W @ feature + history_state))
* ``history_no_image`` same with the image-feature term replaced by zero

``seg`` and ``history_state`` are the final hidden states of two recurrent
encoders (LSTM cells) over token embeddings; empty sequences encode to zero
vectors. Candidates are scored independently, so several may clear the
decision threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import torch
from torch import nn

from refgame_resolver.data import PAD, Candidate, Example

CONDITIONS = ("no_history", "history", "history_no_image")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    embedding_dim: int = 512
    hidden_dim: int = 512
    learning_rate: float = 0.001
    batch_size: int = 512
    positive_weight: float = 5.5
    threshold: float = 0.5
    condition: str = "history"

    def __post_init__(self) -> None:
        numeric = (
            self.embedding_dim,
            self.hidden_dim,
            self.learning_rate,
            self.batch_size,
            self.positive_weight,
        )
        if any(v <= 0 for v in numeric):
            raise ConfigError("all model dimensions and rates must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.condition not in CONDITIONS:
            raise ConfigError(f"condition must be one of {CONDITIONS}")

    def small(self, **overrides) -> "ModelConfig":
        return replace(self, **overrides)


def _normalize(v: torch.Tensor) -> torch.Tensor:
    """Unit vectors; rows with zero norm stay zero."""
    norm = v.norm(dim=-1, keepdim=True)
    return v / torch.where(norm == 0, torch.ones_like(norm), norm)


class CandidateScorer(nn.Module):
    def __init__(self, vocab_size: int, feature_dim: int, config: ModelConfig):
        super().__init__()
        self.config = config
        self.feature_dim = feature_dim
        self.embedding = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=PAD)
        self.segment_encoder = nn.LSTM(
            config.embedding_dim, config.hidden_dim, batch_first=True
        )
        self.history_encoder = nn.LSTM(
            config.embedding_dim, config.hidden_dim, batch_first=True
        )
        self.image_projection = nn.Linear(feature_dim, config.hidden_dim)

    # -- encoders ----------------------------------------------------------

    def encode_sequences(self, encoder: nn.LSTM, sequences: list[list[int]]) -> torch.Tensor:
        """Final hidden state per sequence; empty sequences yield zero rows."""
        device = self.embedding.weight.device
        out = torch.zeros(
            len(sequences), self.config.hidden_dim,
            device=device, dtype=self.embedding.weight.dtype,
        )
        lengths = [len(s) for s in sequences]
        nonempty = [i for i, n in enumerate(lengths) if n > 0]
        if not nonempty:
            return out
        max_len = max(lengths[i] for i in nonempty)
        padded = torch.full((len(nonempty), max_len), PAD, dtype=torch.long, device=device)
        for row, i in enumerate(nonempty):
            padded[row, : lengths[i]] = torch.tensor(
                sequences[i], dtype=torch.long, device=device
            )
        packed = nn.utils.rnn.pack_padded_sequence(
            self.embedding(padded),
            torch.tensor([lengths[i] for i in nonempty]),
            batch_first=True,
            enforce_sorted=False,
        )
        _, (hidden, _) = encoder(packed)
        out[nonempty] = hidden[-1]
        return out

    def encode_segment(self, token_ids: list[int]) -> torch.Tensor:
        return self.encode_sequences(self.segment_encoder, [token_ids])[0]

    # -- scoring -------------------------------------------------------------

    def candidate_representations(self, candidates: list[Candidate]) -> torch.Tensor:
        condition = self.config.condition
        device = self.embedding.weight.device
        dtype = self.embedding.weight.dtype
        if condition == "history_no_image":
            projected = torch.zeros(
                len(candidates), self.config.hidden_dim, device=device, dtype=dtype
            )
        else:
            features = np.stack([c.feature for c in candidates])
            if features.shape[1] != self.feature_dim:
                raise ConfigError(
                    f"feature dim {features.shape[1]} != projection input {self.feature_dim}"
                )
            projected = self.image_projection(
                torch.as_tensor(features, device=device).to(dtype)
            )
        if condition in ("history", "history_no_image"):
            history = self.encode_sequences(
                self.history_encoder, [c.history_ids for c in candidates]
            )
            projected = projected + history
        return _normalize(torch.relu(projected))

    def logits(self, examples: list[Example]) -> tuple[torch.Tensor, torch.Tensor]:
        """Flat per-candidate logits and {0,1} target labels for a batch."""
        segment_reps = self.encode_sequences(
            self.segment_encoder, [ex.segment_ids for ex in examples]
        )
        flat: list[Candidate] = []
        owner: list[int] = []
        for i, ex in enumerate(examples):
            flat.extend(ex.candidates)
            owner.extend([i] * len(ex.candidates))
        reps = self.candidate_representations(flat)
        logits = (segment_reps[owner] * reps).sum(dim=-1)
        labels = torch.tensor(
            [1.0 if c.target else 0.0 for c in flat],
            device=logits.device, dtype=logits.dtype,
        )
        return logits, labels


def score_candidates(model: CandidateScorer, example: Example) -> list[float]:
    """Independent probability per candidate (several may exceed threshold)."""
    with torch.no_grad():
        logits, _ = model.logits([example])
        return torch.sigmoid(logits).tolist()
