"""A toy single-head cross-attention layer over seeded prompt embeddings.

Keys and values share the embedding rows and there are no learned
projections. Token embeddings depend only on ``(token, seed, channels)``,
so repeated tokens produce identical rows.
"""

import zlib

import numpy as np

from ._validation import check_feature_grid
from .exceptions import DimensionMismatchError, EmptyPromptError


def _token_row(token, seed, channels):
    key = zlib.crc32(token.encode("utf-8"))
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, key, int(channels)])
    row = rng.standard_normal(channels)
    return row / np.linalg.norm(row)


def embed_prompt(tokens, seed, channels):
    """Return a K x C array of unit-norm rows, one per token.

    An empty token list (the blank background prompt) embeds as the single
    row of the empty-string token.
    """
    channels = int(channels)
    if channels < 1:
        raise ValueError(f"channels must be >= 1, got {channels}")
    tokens = list(tokens) or [""]
    return np.stack([_token_row(tok, seed, channels) for tok in tokens])


def softmax(logits, axis=-1):
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def cross_attention(latent, prompt):
    """Attend every cell of ``latent`` (H x W x C) to the prompt rows (K x C).

    Returns the attended grid (H x W x C) and the (H*W) x K weight matrix.
    """
    latent = check_feature_grid(latent, "latent")
    prompt = np.asarray(prompt, dtype=np.float64)
    if prompt.ndim != 2 or prompt.shape[0] < 1:
        raise DimensionMismatchError(f"prompt must be a K x C array with K >= 1, got shape {prompt.shape}")
    h, w, c = latent.shape
    if prompt.shape[1] != c:
        raise DimensionMismatchError(f"latent has {c} channels but prompt rows have {prompt.shape[1]}")
    queries = latent.reshape(h * w, c)
    weights = softmax(queries @ prompt.T / np.sqrt(c), axis=1)
    out = (weights @ prompt).reshape(h, w, c)
    return out, weights


def subject_attention_map(weights, subject_index, width, height):
    """Column ``subject_index`` of the weights, reshaped row-major to (height, width)."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != width * height:
        raise DimensionMismatchError(
            f"weights shape {weights.shape} does not match a {height}x{width} grid"
        )
    k = weights.shape[1]
    if not 0 <= subject_index < k:
        raise IndexError(f"subject_index {subject_index} out of range for {k} token(s)")
    return weights[:, subject_index].reshape(height, width).copy()


def subject_token_index(obj):
    """Explicit ``subject_index`` if set, else the last token (a noun-phrase head guess)."""
    if obj.subject_index is not None:
        return obj.subject_index
    if not obj.prompt_tokens:
        raise EmptyPromptError(f"object {obj.id!r} has an empty prompt and no subject_index")
    return len(obj.prompt_tokens) - 1
