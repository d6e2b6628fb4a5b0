"""Tiny transformer encoder with an MLM head and a 6-way category head."""

from __future__ import annotations

import torch
from torch import nn

from .data import N_CATEGORIES, Vocab


class TinyEncoder(nn.Module):
    """Token + position embeddings, a small encoder stack, two heads.

    The MLM head predicts original tokens at corrupted positions; the
    category head predicts the logical-indicator category at every
    ``[LGMASK]`` position. Dropout is zero throughout so that equal
    seeds give bit-equal runs.
    """

    def __init__(
        self,
        vocab: Vocab,
        hidden: int = 128,
        layers: int = 2,
        heads: int = 2,
        seq_cap: int = 96,
    ):
        super().__init__()
        self.vocab = vocab
        self.seq_cap = seq_cap
        self.tok_emb = nn.Embedding(len(vocab), hidden, padding_idx=0)
        self.pos_emb = nn.Embedding(seq_cap, hidden)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden,
            nhead=heads,
            dim_feedforward=4 * hidden,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.norm = nn.LayerNorm(hidden)
        self.mlm_head = nn.Linear(hidden, len(vocab))
        self.lcp_head = nn.Linear(hidden, N_CATEGORIES)

    def forward(
        self, ids: torch.Tensor, pad_mask: torch.Tensor
    ) -> torch.Tensor:
        """Hidden states [batch, seq, hidden]; ``pad_mask`` True at padding."""
        n = ids.shape[1]
        pos = torch.arange(n, device=ids.device)
        h = self.tok_emb(ids) + self.pos_emb(pos)[None, :, :]
        h = self.encoder(h, src_key_padding_mask=pad_mask)
        return self.norm(h)

    def lcp_parameters(self):
        """Parameters reached only through the category head."""
        return self.lcp_head.parameters()

    def mlm_parameters(self):
        """Parameters reached only through the MLM head."""
        return self.mlm_head.parameters()
