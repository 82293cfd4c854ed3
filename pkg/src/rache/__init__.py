"""Paillier encryption accelerated by radix-additive ciphertext caching."""
from rache.errors import (
    DomainError,
    EmptyDatasetError,
    FormatError,
    KeyGenerationError,
    KeyMismatchError,
    MalformedCiphertextError,
    OutOfCacheRangeError,
    RacheError,
    VerificationError,
)
from rache.paillier import (
    Ciphertext,
    PrivateKey,
    PublicKey,
    decrypt,
    encrypt,
    he_add,
    keygen,
    rerandomize,
)
from rache.radix import (
    DigitVector,
    EncodeStats,
    RadixCache,
    cache_init,
    decompose,
    optimal_radix,
    rache_encrypt,
    rache_encrypt_batch,
    recompose,
    worst_case_additions,
)

__version__ = "0.1.0"
