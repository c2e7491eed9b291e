import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoman.protocol import NONE, ClearPair, PayloadEntry, SealedPayload, Token
from topoman.security import (
    AuthenticatedHeaderFields,
    ControllerKeyPair,
    DecryptError,
    IntegrityError,
    TokenTable,
    UnknownToken,
    open_payload,
    open_segments,
    seal_entry,
    seal_payload,
)

HDR = AuthenticatedHeaderFields(ClearPair('10.0.0.1', '10.0.0.9'), False, True, True)


def test_seal_open_round_trip(keypair, rng):
    sealed = seal_payload(b'device=fw1;in=NONE;out=eth0\n', HDR, keypair.public_key, rng)
    assert open_payload(sealed, HDR, keypair.private_key) == b'device=fw1;in=NONE;out=eth0\n'


def test_empty_payload(keypair, rng):
    sealed = seal_payload(b'', HDR, keypair.public_key, rng)
    assert open_payload(sealed, HDR, keypair.private_key) == b''


def test_ciphertext_hides_plaintext(keypair, rng):
    plaintext = b'device=secretbox;in=NONE;out=eth0\n'
    sealed = seal_payload(plaintext, HDR, keypair.public_key, rng)
    assert b'secretbox' not in sealed.ciphertext + sealed.wrapped_blob


def test_seeded_sealing_is_reproducible(keypair):
    a = seal_payload(b'abc', HDR, keypair.public_key, random.Random(3))
    b = seal_payload(b'abc', HDR, keypair.public_key, random.Random(3))
    c = seal_payload(b'abc', HDR, keypair.public_key, random.Random(4))
    assert a == b
    assert a != c


def test_seeded_key_pairs_are_reproducible():
    a = ControllerKeyPair.generate(random.Random(1))
    b = ControllerKeyPair.generate(random.Random(1))
    assert a.public_key.public_bytes_raw() == b.public_key.public_bytes_raw()


def test_wrong_private_key(keypair, rng):
    other = ControllerKeyPair.generate(random.Random(99))
    sealed = seal_payload(b'x', HDR, keypair.public_key, rng)
    with pytest.raises(DecryptError):
        open_payload(sealed, HDR, other.private_key)


@pytest.mark.parametrize('tamper', [
    lambda hdr: replace(hdr, probe_pair_id=ClearPair('10.0.0.1', '10.0.0.8')),
    lambda hdr: replace(hdr, flag_header_sec=True),
    lambda hdr: replace(hdr, flag_payload_sec=False),
    lambda hdr: replace(hdr, flag_payload_append=False),
])
def test_header_fields_are_bound(keypair, rng, tamper):
    sealed = seal_payload(b'payload', HDR, keypair.public_key, rng)
    with pytest.raises(IntegrityError):
        open_payload(sealed, tamper(HDR), keypair.private_key)


def test_truncated_blob(keypair, rng):
    sealed = seal_payload(b'payload', HDR, keypair.public_key, rng)
    with pytest.raises(DecryptError):
        open_payload(SealedPayload(sealed.wrapped_blob[:40], sealed.ciphertext), HDR, keypair.private_key)


def test_truncated_ciphertext(keypair, rng):
    sealed = seal_payload(b'payload', HDR, keypair.public_key, rng)
    with pytest.raises(IntegrityError):
        open_payload(SealedPayload(sealed.wrapped_blob, sealed.ciphertext[:-1]), HDR, keypair.private_key)


def test_open_segments(keypair, rng):
    entries = (PayloadEntry('fw1', NONE, 'eth0'), PayloadEntry('ids1', 'eth0', NONE))
    segments = [seal_entry(entry, HDR, keypair.public_key, rng) for entry in entries]
    assert open_segments(segments, HDR, keypair.private_key) == entries


def test_segment_that_is_not_an_entry(keypair, rng):
    segment = seal_payload(b'not an entry', HDR, keypair.public_key, rng)
    with pytest.raises(IntegrityError):
        open_segments([segment], HDR, keypair.private_key)


@settings(max_examples=50, deadline=None)
@given(st.binary(max_size=300), st.booleans(), st.booleans(), st.integers(0, 2 ** 64 - 1))
def test_round_trip_property(payload, header_sec, append, token):
    keypair = ControllerKeyPair.generate(random.Random(token))
    pair = Token(token) if header_sec else ClearPair('192.168.0.1', '10.1.2.3')
    hdr = AuthenticatedHeaderFields(pair, header_sec, True, append)
    sealed = seal_payload(payload, hdr, keypair.public_key, random.Random(token ^ 1))
    assert open_payload(sealed, hdr, keypair.private_key) == payload


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 65536), st.integers(0, 2 ** 32 - 1))
def test_round_trip_up_to_64_kib(size, seed):
    payload = random.Random(seed).randbytes(size)
    keypair = ControllerKeyPair.generate(random.Random(seed ^ 1))
    sealed = seal_payload(payload, HDR, keypair.public_key, random.Random(seed ^ 2))
    assert open_payload(sealed, HDR, keypair.private_key) == payload


def test_round_trip_of_exactly_64_kib(keypair, rng):
    payload = rng.randbytes(65536)
    sealed = seal_payload(payload, HDR, keypair.public_key, rng)
    assert len(sealed.ciphertext) == 16 + 65536
    assert open_payload(sealed, HDR, keypair.private_key) == payload


class TestTokenTable:

    def test_issue_and_resolve(self):
        table = TokenTable(random.Random(0), validity=10)
        pair = ClearPair('10.0.0.1', '10.0.0.9')
        token = table.issue(pair, now=5)
        assert isinstance(token, Token)
        assert token in table
        assert table.resolve(token, now=15) == pair

    def test_expired(self):
        table = TokenTable(random.Random(0), validity=10)
        token = table.issue(ClearPair('10.0.0.1', '10.0.0.9'), now=5)
        with pytest.raises(UnknownToken):
            table.resolve(token, now=16)

    def test_unknown(self):
        with pytest.raises(UnknownToken):
            TokenTable(random.Random(0)).resolve(Token(42))

    def test_tokens_are_unique(self):
        table = TokenTable(random.Random(0))
        tokens = {table.issue(ClearPair('10.0.0.1', f'10.0.1.{k}')) for k in range(200)}
        assert len(tokens) == len(table) == 200

    def test_collisions_are_redrawn(self):

        class Repeating(random.Random):
            draws = iter([7, 7, 7, 8])

            def getrandbits(self, k):
                return next(self.draws)

        table = TokenTable(Repeating(), validity=10)
        first = table.issue(ClearPair('10.0.0.1', '10.0.0.2'))
        second = table.issue(ClearPair('10.0.0.1', '10.0.0.3'))
        assert (first.value, second.value) == (7, 8)
        assert table.collisions == 2

    def test_purge(self):
        table = TokenTable(random.Random(0), validity=10)
        old = table.issue(ClearPair('10.0.0.1', '10.0.0.2'), now=0)
        new = table.issue(ClearPair('10.0.0.1', '10.0.0.3'), now=20)
        table.purge(now=15)
        assert old not in table and new in table
        table.purge()
        assert len(table) == 0

    def test_revoke(self):
        table = TokenTable(random.Random(0), validity=10)
        kept = table.issue(ClearPair('10.0.0.1', '10.0.0.2'))
        dropped = table.issue(ClearPair('10.0.0.1', '10.0.0.3'))
        table.revoke([dropped, Token(5)])
        assert kept in table and dropped not in table
        with pytest.raises(UnknownToken):
            table.resolve(dropped)
