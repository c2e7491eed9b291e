"""
Module: Payload Sealing

Seal-then-hash protection of probe payloads toward the MB Controller.

Sealing draws a fresh 256-bit key and encrypts the payload with AES-256-CTR under a
random 128-bit nonce (prepended to the ciphertext). The SHA-256 digest covers the
canonical authenticated header fields followed by the ciphertext. The key and digest
are then wrapped to the controller public key: an ephemeral X25519 exchange, HKDF-SHA256
and AES-256-GCM, giving ``ephemeral_public ‖ gcm_nonce ‖ gcm_ciphertext``.

Every random byte comes from the caller's `rng` (any object with ``randbytes``), so
simulations that seed their rng reproduce the same sealed bytes.
"""

import hmac
import random
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import x25519
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..protocol import PayloadEntry, SealedPayload, canonical_auth_fields
from ..protocol._error import ProtocolError
from ._error import error_stack

KEY_SIZE = 32
CTR_NONCE_SIZE = 16
GCM_NONCE_SIZE = 12
DIGEST_SIZE = 32
_WRAP_INFO = b'topoman payload key wrap'
_system_rng = random.SystemRandom()


def _raw_public(public_key):
    return public_key.public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)


@dataclass(frozen=True)
class ControllerKeyPair:
    """
    The controller's X25519 key pair; agents receive only `public_key`.
    """
    public_key: x25519.X25519PublicKey
    private_key: x25519.X25519PrivateKey

    @classmethod
    def generate(cls, rng=None):
        """Generates a key pair, deterministically when `rng` is seeded."""
        if rng is None:
            private_key = x25519.X25519PrivateKey.generate()
        else:
            private_key = x25519.X25519PrivateKey.from_private_bytes(rng.randbytes(KEY_SIZE))
        return cls(private_key.public_key(), private_key)


@dataclass(frozen=True)
class AuthenticatedHeaderFields:
    """The header subset bound into the payload digest."""
    probe_pair_id: object
    flag_header_sec: bool
    flag_payload_sec: bool
    flag_payload_append: bool

    @classmethod
    def from_header(cls, header):
        return cls(header.probe_pair_id, header.flag_header_sec,
                   header.flag_payload_sec, header.flag_payload_append)

    def canonical(self):
        return canonical_auth_fields(self.probe_pair_id, self.flag_header_sec,
                                     self.flag_payload_sec, self.flag_payload_append)


def _digest(hdr, ciphertext):
    h = hashes.Hash(hashes.SHA256())
    h.update(hdr.canonical())
    h.update(ciphertext)
    return h.finalize()


def _ctr(key, nonce):
    return Cipher(algorithms.AES(key), modes.CTR(nonce))


def _wrap_key(shared, ephemeral_pub, recipient_pub):
    return HKDF(
        algorithm=hashes.SHA256(),
        length=KEY_SIZE,
        salt=None,
        info=_WRAP_INFO + ephemeral_pub + recipient_pub,
    ).derive(shared)


def seal_payload(plaintext, hdr, pub, rng=None):
    """
    Seals payload bytes to the controller public key.

    Args:
        plaintext (bytes): Payload bytes, possibly empty.
        hdr (AuthenticatedHeaderFields): Header fields to bind.
        pub (X25519PublicKey): Controller public key.
        rng: Randomness source with ``randbytes``. Defaults to the system source.

    Returns:
        SealedPayload: Wrapped key blob and nonce-prefixed ciphertext.
    """
    rng = rng or _system_rng
    key = rng.randbytes(KEY_SIZE)
    nonce = rng.randbytes(CTR_NONCE_SIZE)
    encryptor = _ctr(key, nonce).encryptor()
    ciphertext = nonce + encryptor.update(plaintext) + encryptor.finalize()
    digest = _digest(hdr, ciphertext)

    ephemeral = x25519.X25519PrivateKey.from_private_bytes(rng.randbytes(KEY_SIZE))
    ephemeral_pub = _raw_public(ephemeral.public_key())
    wrap_key = _wrap_key(ephemeral.exchange(pub), ephemeral_pub, _raw_public(pub))
    gcm_nonce = rng.randbytes(GCM_NONCE_SIZE)
    wrapped = AESGCM(wrap_key).encrypt(gcm_nonce, key + digest, None)
    return SealedPayload(ephemeral_pub + gcm_nonce + wrapped, ciphertext)


def open_payload(sealed, hdr, priv):
    """
    Opens a sealed payload.

    Args:
        sealed (SealedPayload): The sealed segment.
        hdr (AuthenticatedHeaderFields): Header fields as received.
        priv (X25519PrivateKey): Controller private key.

    Returns:
        bytes: The plaintext.

    Raises:
        DecryptError: The wrapped blob cannot be unwrapped with `priv`.
        IntegrityError: The digest does not match the ciphertext and header fields.
    """
    blob = sealed.wrapped_blob
    if len(blob) <= KEY_SIZE + GCM_NONCE_SIZE:
        error_stack('SEC-DECRYPT', f'wrapped blob of {len(blob)} bytes')
    ephemeral_pub = blob[:KEY_SIZE]
    gcm_nonce = blob[KEY_SIZE:KEY_SIZE + GCM_NONCE_SIZE]
    try:
        peer = x25519.X25519PublicKey.from_public_bytes(ephemeral_pub)
        shared = priv.exchange(peer)
        wrap_key = _wrap_key(shared, ephemeral_pub, _raw_public(priv.public_key()))
        unwrapped = AESGCM(wrap_key).decrypt(gcm_nonce, blob[KEY_SIZE + GCM_NONCE_SIZE:], None)
    except (InvalidTag, ValueError) as e:
        raise error_stack.build('SEC-DECRYPT', type(e).__name__) from e
    if len(unwrapped) != KEY_SIZE + DIGEST_SIZE:
        error_stack('SEC-DECRYPT', 'unwrapped blob has the wrong size')
    key, digest = unwrapped[:KEY_SIZE], unwrapped[KEY_SIZE:]

    ciphertext = sealed.ciphertext
    if len(ciphertext) < CTR_NONCE_SIZE or not hmac.compare_digest(digest, _digest(hdr, ciphertext)):
        error_stack('SEC-INTEGRITY', str(hdr.probe_pair_id))
    decryptor = _ctr(key, ciphertext[:CTR_NONCE_SIZE]).decryptor()
    return decryptor.update(ciphertext[CTR_NONCE_SIZE:]) + decryptor.finalize()


def seal_entry(entry, hdr, pub, rng=None):
    """Seals one hop's payload entry as its own segment."""
    return seal_payload(entry.to_line().encode('ascii'), hdr, pub, rng)


def open_segments(segments, hdr, priv):
    """
    Opens every sealed hop segment and parses the entries they carry.

    Raises:
        IntegrityError, DecryptError: On any segment that fails to open.
    """
    entries = []
    for segment in segments:
        plaintext = open_payload(segment, hdr, priv)
        try:
            entries.append(PayloadEntry.from_line(plaintext.decode('ascii').rstrip('\n')))
        except (UnicodeDecodeError, ProtocolError) as e:
            raise error_stack.build('SEC-PLAINTEXT', repr(plaintext[:32])) from e
    return tuple(entries)
