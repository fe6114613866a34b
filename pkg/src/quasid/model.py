"""Model container: encoder, decoder, and the quantizer codebooks.

Parameter ordering (encoder layers, decoder layers, codebooks) is fixed;
the optimizer and the checkpoint format both rely on it.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import Mlp, init_mlp


@dataclass
class ModelState:
    encoder: Mlp
    decoder: Mlp
    codebooks: np.ndarray  # (L, K, d)

    @property
    def dims(self):
        L, K, d = self.codebooks.shape
        return self.encoder.in_dim, d, L, K

    def param_arrays(self):
        return self.encoder.param_arrays() + self.decoder.param_arrays() + [self.codebooks]

    def decay_mask(self, codebook_weight_decay=False):
        """Weight decay applies to MLP weights/biases; codebooks opt in."""
        n_mlp = len(self.encoder.param_arrays()) + len(self.decoder.param_arrays())
        return [True] * n_mlp + [codebook_weight_decay]


def init_model(d_in: int, d: int, L: int, K: int, rng) -> ModelState:
    """Encoder d_in -> 2d -> d with ReLU hidden; decoder mirrors it.

    Codebooks start at zero; the trainer replaces them with a k-means
    warmup before the first step.
    """
    encoder = init_mlp([d_in, 2 * d, d], rng)
    decoder = init_mlp([d, 2 * d, d_in], rng)
    codebooks = np.zeros((L, K, d))
    return ModelState(encoder=encoder, decoder=decoder, codebooks=codebooks)
