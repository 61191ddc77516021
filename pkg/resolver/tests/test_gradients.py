"""Analytic gradients of the loss vs central finite differences (toy dims)."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from refgame_resolver.model import CandidateScorer, ModelConfig
from refgame_resolver.train import batch_loss
from tests.conftest import make_vocabulary, random_example

EPS = 1e-6
REL_TOL = 1e-4


def build_toy():
    torch.manual_seed(11)
    vocabulary = make_vocabulary([f"w{i}" for i in range(6)])
    config = ModelConfig(embedding_dim=2, hidden_dim=2, batch_size=4, condition="history")
    model = CandidateScorer(len(vocabulary), 3, config).double()
    rng = np.random.default_rng(5)
    examples = [
        random_example(rng, vocabulary, n_candidates=3, feature_dim=3, with_history=True)
        for _ in range(2)
    ]
    criterion = nn.BCEWithLogitsLoss(pos_weight=torch.tensor(5.5, dtype=torch.double))
    return model, examples, criterion


def test_loss_gradients_match_finite_differences():
    model, examples, criterion = build_toy()

    model.zero_grad()
    loss = batch_loss(model, examples, criterion)
    loss.backward()
    analytic = {
        name: param.grad.detach().clone()
        for name, param in model.named_parameters()
        if param.grad is not None
    }

    checked = 0
    for name, param in model.named_parameters():
        grad = analytic.get(name)
        if grad is None:
            continue
        flat = param.detach().view(-1)
        grad_flat = grad.view(-1)
        for index in range(flat.numel()):
            original = flat[index].item()
            with torch.no_grad():
                flat[index] = original + EPS
                up = batch_loss(model, examples, criterion).item()
                flat[index] = original - EPS
                down = batch_loss(model, examples, criterion).item()
                flat[index] = original
            numeric = (up - down) / (2 * EPS)
            a = grad_flat[index].item()
            assert abs(a - numeric) <= REL_TOL * max(1.0, abs(a), abs(numeric)), (
                f"{name}[{index}]: analytic {a:.8f} vs numeric {numeric:.8f}"
            )
            checked += 1
    assert checked > 100  # the toy model still has a meaningful parameter count
