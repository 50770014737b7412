"""End-to-end coding chains and the effective-BSC reduction.

Every scenario exposes ``simulate(snr_db, n_blocks, rng) -> BlockResult``
plus ``rate`` (for Eb/N0 conversion), ``pre_len`` and ``post_len``.
``snr_db`` is always the energy per transmitted coded bit over N0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from secmetrics import metrics, sim
from secmetrics.channel import AwgnChannel, JammingProfile, noise_var_profile, transmit
from secmetrics.codes.bch import BchCode, bch_construct, bch_decode_batch, bch_encode
from secmetrics.codes.ldpc import DEFAULT_MAX_ITERS, LdpcCode, ldpc_construct_fixture, ldpc_decode_batch, ldpc_encode
from secmetrics.codes.scramble import Scrambler, interleaver_from_key
from secmetrics.gf2 import mat_vec_mul
from secmetrics.modem import ModScheme, bpsk_hard, bpsk_llr, bpsk_modulate, dpsk_demodulate, dpsk_modulate, ebno_to_snr

PARTY_ALPHA = {"bob": 0.2, "eve": 0.7}


def _random_bits(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, 2, size=shape, dtype=np.uint8)


def _hard_channel(bits: np.ndarray, snr_db: float, mod: ModScheme, rng: np.random.Generator) -> np.ndarray:
    """Modulate rows of ``bits``, add noise, detect; returns hard decisions."""
    es_n0 = 10 ** (snr_db / 10) * mod.bits_per_symbol
    ch = AwgnChannel(es_n0)
    if mod.kind == "bpsk":
        return bpsk_hard(transmit(ch, bpsk_modulate(bits), None, rng))
    return dpsk_demodulate(transmit(ch, dpsk_modulate(bits, mod.order), None, rng), mod.order)


@dataclass(frozen=True, eq=False)
class UncodedScenario:
    """Uncoded modulation over AWGN; errors are counted on ``n``-bit blocks."""

    n: int = 127
    mod: ModScheme = field(default_factory=ModScheme)

    rate = 1.0

    @property
    def pre_len(self) -> int:
        return self.n

    @property
    def post_len(self) -> int:
        return self.n

    def simulate(self, snr_db: float, n_blocks: int, rng: np.random.Generator) -> sim.BlockResult:
        bits = _random_bits(rng, (n_blocks, self.n))
        errs = (_hard_channel(bits, snr_db, self.mod, rng) != bits).sum(axis=1)
        return sim.BlockResult(errs, errs.copy(), self.n, self.n)


@dataclass(frozen=True, eq=False)
class BchScenario:
    """BCH code as the outer code, hard-decision demodulation, no inner code.

    ``codewords_per_frame`` codewords are modulated together (two for
    DQPSK with odd ``n``). One block of the result is one codeword.
    """

    code: BchCode
    mod: ModScheme = field(default_factory=ModScheme)
    codewords_per_frame: int = 1

    def __post_init__(self):
        bits = self.code.n * self.codewords_per_frame
        if bits % self.mod.bits_per_symbol:
            raise ValueError("frame size is not a whole number of symbols")
        if sim.CHUNK_BLOCKS % self.codewords_per_frame:
            raise ValueError("codewords_per_frame must divide the simulation chunk size")

    @property
    def rate(self) -> float:
        return self.code.rate

    @property
    def pre_len(self) -> int:
        return self.code.n

    @property
    def post_len(self) -> int:
        return self.code.k

    def simulate(self, snr_db: float, n_blocks: int, rng: np.random.Generator) -> sim.BlockResult:
        g = self.codewords_per_frame
        frames = -(-n_blocks // g)
        msgs = _random_bits(rng, (frames * g, self.code.k))
        cw = bch_encode(self.code, msgs)
        rx = _hard_channel(cw.reshape(frames, -1), snr_db, self.mod, rng).reshape(frames * g, self.code.n)
        dec, ok, _ = bch_decode_batch(self.code, rx)
        pre = (rx != cw).sum(axis=1)[:n_blocks]
        post = (dec != msgs).sum(axis=1)[:n_blocks]
        return sim.BlockResult(pre, post, self.code.n, self.code.k, {"bch_success": ok[:n_blocks]})


@dataclass(frozen=True, eq=False)
class ScramblerBchScenario:
    """k-bit scrambler as the outer code, BCH as the inner code, BPSK/AWGN.

    ``pre_errors`` are errors in the BCH-decoded (still scrambled) message;
    ``post_errors`` are errors after descrambling.
    """

    scrambler: Scrambler
    code: BchCode

    @classmethod
    def build(cls, seed: int, m: int = 7, t: int = 10) -> ScramblerBchScenario:
        code = bch_construct(m, t)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x5C,)))
        return cls(Scrambler.random(code.k, rng), code)

    @property
    def rate(self) -> float:
        return self.code.rate

    @property
    def pre_len(self) -> int:
        return self.code.k

    @property
    def post_len(self) -> int:
        return self.code.k

    def simulate(self, snr_db: float, n_blocks: int, rng: np.random.Generator) -> sim.BlockResult:
        msgs = _random_bits(rng, (n_blocks, self.code.k))
        scr = mat_vec_mul(self.scrambler.S, msgs)
        cw = bch_encode(self.code, scr)
        rx = _hard_channel(cw, snr_db, ModScheme(), rng)
        dec, ok, _ = bch_decode_batch(self.code, rx)
        out = mat_vec_mul(self.scrambler.S_inv, dec)
        return sim.BlockResult(
            (dec != scr).sum(axis=1), (out != msgs).sum(axis=1), self.code.k, self.code.k,
            {"bch_success": ok, "channel_errors": (rx != cw).sum(axis=1)},
        )


@dataclass(frozen=True, eq=False)
class KeyedJammingScenario:
    """Keyed-interleaver scheme with a jammed BCH-coded key and an LDPC inner code.

    LDPC message layout: positions ``0..126`` carry the BCH(127,64) key
    codeword, ``127..879`` the interleaved message. A fresh uniform key is
    drawn for every block. Jamming hits exactly the key-codeword symbols.
    """

    alpha: float
    ldpc: LdpcCode
    key_code: BchCode
    max_iters: int = DEFAULT_MAX_ITERS

    @classmethod
    def build(cls, alpha: float | None = None, party: str | None = None,
              max_iters: int = DEFAULT_MAX_ITERS, ldpc: LdpcCode | None = None) -> KeyedJammingScenario:
        if alpha is None:
            if party not in PARTY_ALPHA:
                raise ValueError("give alpha or party in {'bob', 'eve'}")
            alpha = PARTY_ALPHA[party]
        ldpc = ldpc or ldpc_construct_fixture()
        key_code = bch_construct(7, 10)
        if key_code.n + cls.message_bits_for(ldpc, key_code) != ldpc.k:
            raise ValueError("key and message positions do not fill the LDPC dimension")
        return cls(alpha, ldpc, key_code, max_iters)

    @staticmethod
    def message_bits_for(ldpc: LdpcCode, key_code: BchCode) -> int:
        return ldpc.k - key_code.n

    @property
    def message_bits(self) -> int:
        return self.ldpc.k - self.key_code.n

    @property
    def rate(self) -> float:
        return self.ldpc.k / self.ldpc.n

    @property
    def pre_len(self) -> int:
        return self.key_code.n

    @property
    def post_len(self) -> int:
        return self.message_bits

    def _transmit(self, snr_db: float, n_blocks: int, rng: np.random.Generator):
        kn = self.key_code.n
        keys = _random_bits(rng, (n_blocks, self.key_code.k))
        msgs = _random_bits(rng, (n_blocks, self.message_bits))
        perms = [interleaver_from_key(k, self.message_bits) for k in keys]
        inter = np.stack([m[il.permutation] for m, il in zip(msgs, perms)])
        u = np.concatenate([bch_encode(self.key_code, keys), inter], axis=1)
        cw = ldpc_encode(self.ldpc, u)
        ch = AwgnChannel(10 ** (snr_db / 10))
        jam = JammingProfile(self.alpha, np.arange(kn))
        y = transmit(ch, bpsk_modulate(cw), jam, rng)
        llr = bpsk_llr(y, noise_var_profile(ch, jam, self.ldpc.n))
        bits, post_llr, iters, ok = ldpc_decode_batch(self.ldpc, llr, self.max_iters)
        return keys, msgs, perms, cw, bits, post_llr, iters, ok

    def simulate(self, snr_db: float, n_blocks: int, rng: np.random.Generator) -> sim.BlockResult:
        kn = self.key_code.n
        keys, msgs, perms, cw, bits, _, iters, ok = self._transmit(snr_db, n_blocks, rng)
        pre = (bits[:, :kn] != cw[:, :kn]).sum(axis=1)
        key_hat, bch_ok, _ = bch_decode_batch(self.key_code, bits[:, :kn])
        rx_msg = bits[:, kn:self.ldpc.k]
        post = np.empty(n_blocks, dtype=np.int64)
        key_err = np.zeros(n_blocks, dtype=bool)
        for b in range(n_blocks):
            il = perms[b]
            if not np.array_equal(key_hat[b], keys[b]):
                key_err[b] = True
                il = interleaver_from_key(key_hat[b], self.message_bits)
            post[b] = int((rx_msg[b][il.inverse_permutation] != msgs[b]).sum())
        return sim.BlockResult(pre, post, kn, self.message_bits, {
            "ldpc_success": ok, "ldpc_iters": iters, "bch_success": bch_ok, "key_error": key_err,
        })

    def soft_simulate(self, snr_db: float, n_blocks: int, rng: np.random.Generator):
        """LDPC decoder output LLRs, hard decisions and transmitted bits."""
        _, _, _, cw, bits, post_llr, _, _ = self._transmit(snr_db, n_blocks, rng)
        return post_llr, bits, cw


# ------------------------------------------------------------- sweeps

def _estimates_to_curve(metric_id, axis, xs, ests, params) -> metrics.MetricCurve:
    return metrics.MetricCurve(metric_id, axis, [metrics.CurvePoint.from_estimate(x, e) for x, e in zip(xs, ests)],
                               dict(params))


def sweep(scenario, x_grid, axis: str, trials: int, seed: int, *, t: int | None = None,
          deltas=(), S_b: int | None = None, executor=None, stream: int = 0) -> dict[str, metrics.MetricCurve]:
    """Simulate every grid point once and derive all requested curves from it.

    Curves returned: ``ber_pre`` and ``ber_post`` always, ``be_cdf_t{t}`` when
    ``t`` is given, ``ber_cdf_pre_d{delta}``/``ber_cdf_post_d{delta}`` per delta.
    ``trials`` counts S_b-bit windows; the block count is scaled to match.
    """
    xs = [float(x) for x in x_grid]
    if not xs:
        raise ValueError("empty grid")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    S_b = S_b or scenario.post_len
    if S_b % scenario.post_len:
        raise ValueError(f"S_b={S_b} is not a multiple of the {scenario.post_len}-bit message block")
    g = S_b // scenario.post_len
    collected: dict[str, list] = {}
    for x in xs:
        snr = x if axis == "snr_db" else ebno_to_snr(x, scenario.rate)
        res = sim.simulate(scenario, snr, trials * g, seed, executor=executor, stream=stream)
        collected.setdefault("ber_pre", []).append(metrics.estimate_ber(res, "pre"))
        collected.setdefault("ber_post", []).append(metrics.estimate_ber(res, "post"))
        if t is not None:
            collected.setdefault(f"be_cdf_t{t}", []).append(metrics.estimate_be_cdf(res, t))
        for d in deltas:
            collected.setdefault(f"ber_cdf_post_d{d:g}", []).append(metrics.estimate_ber_cdf(res, d, S_b))
            if S_b % res.pre_len == 0 and res.pre_len == res.post_len:
                pre_view = sim.BlockResult(res.post_errors, res.pre_errors, res.post_len, res.pre_len)
                collected.setdefault(f"ber_cdf_pre_d{d:g}", []).append(metrics.estimate_ber_cdf(pre_view, d, S_b))
    params = {"t": t, "S_b": S_b, "trials": trials, "seed": seed, "rate": scenario.rate}
    return {name: _estimates_to_curve(name, axis, xs, ests, params) for name, ests in collected.items()}


def run_scrambler_scenario(ebno_grid, delta_list, trials: int, seed: int, executor=None) -> dict[str, metrics.MetricCurve]:
    """BER and BER-CDF before/after descrambling over 64-bit blocks."""
    scen = ScramblerBchScenario.build(seed)
    return sweep(scen, ebno_grid, "ebno_db", trials, seed, deltas=delta_list, S_b=scen.post_len, executor=executor)


def run_keyed_scenario(party_or_alpha, x_grid, axis: str = "snr_db", t: int = 10, delta_list=(0.05,),
                       trials: int = 10_000, seed: int = 0, executor=None,
                       scenario: KeyedJammingScenario | None = None) -> dict[str, metrics.MetricCurve]:
    """BE-CDF over the key codeword and BER-CDF over the 753 message bits."""
    if scenario is None:
        if isinstance(party_or_alpha, str):
            scenario = KeyedJammingScenario.build(party=party_or_alpha)
        else:
            scenario = KeyedJammingScenario.build(alpha=float(party_or_alpha))
    curves = sweep(scenario, x_grid, axis, trials, seed, t=t, deltas=delta_list, S_b=scenario.message_bits,
                   executor=executor)
    for c in curves.values():
        c.params["alpha"] = scenario.alpha
    return curves


# ------------------------------------------------------ effective BSC

def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def secrecy_capacity_bsc(p_main: float, p_wiretap: float) -> float:
    """``C_s = (1 - h(p_main)) - (1 - h(p_wiretap))`` for degraded BSCs, floored at 0.

    With a noiseless main channel this is ``h(p_wiretap)``, e.g. 0.99277 bits
    for ``p_wiretap = 0.45``.
    """
    for p in (p_main, p_wiretap):
        if not 0 <= p <= 0.5:
            raise ValueError("crossover probabilities must be in [0, 0.5]")
    return max(0.0, binary_entropy(p_wiretap) - binary_entropy(p_main))


def block_interleave(packets: np.ndarray) -> np.ndarray:
    """Depth-``D`` block interleaver across packets.

    ``packets`` has shape ``(D, L)``; output row ``j`` collects bit ``j`` of
    every packet, so consecutive bits of one output row come from different
    packets.
    """
    return np.ascontiguousarray(np.asarray(packets).T)


def lag1_correlation(indicators: np.ndarray) -> float:
    """Mean lag-1 autocorrelation of error indicators along the rows."""
    x = np.asarray(indicators, dtype=float)
    a = x[:, :-1].ravel()
    b = x[:, 1:].ravel()
    if a.std() == 0 or b.std() == 0:
        return 0.0
    return float(np.corrcoef(a, b)[0, 1])


@dataclass(frozen=True)
class EffectiveBscReport:
    delta: float
    p_wiretap_lower: float
    confidence: float
    operating_point_db: float
    p_main: float
    c_s_bits: float
    bob_block_failure: float | None = None
    soft_info_kl: float | None = None
    serial_corr_before: float | None = None
    serial_corr_after: float | None = None
    independence_note: str = ""
    capacity_note: str = (
        "C_s = h(p_wiretap) - h(p_main) with h the binary entropy; for a noiseless main "
        "channel this equals h(p), not p."
    )

    def as_dict(self) -> dict:
        return dict(self.__dict__)


BOB_NOISELESS_FAILURE = 1 - 0.9975


def reduce_to_bsc(eve_curve: metrics.MetricCurve, delta: float, confidence_target: float, *,
                  bob_be_cdf: float | None = None, bob_ber: float | None = None,
                  kl_points=None, serial_corr: tuple[float, float] | None = None) -> EffectiveBscReport:
    """Reduce a wiretap chain to an effective BSC at Eve's operating point.

    The operating point is the largest grid x where Eve's BER-CDF (for
    ``delta``) is at least ``confidence_target``; the crossover lower bound
    there is ``0.5 - delta``. Bob's main channel is treated as noiseless when
    his key-block failure rate is at most ``1 - 0.9975``, otherwise his
    measured BER is used as ``p_main``.
    """
    if not 0 <= delta <= 0.5:
        raise ValueError("delta must be in [0, 0.5]")
    if confidence_target >= 1:
        raise ValueError("confidence target 1 cannot be certified by a finite-trial curve")
    vals = eve_curve.values
    ok = np.nonzero(vals >= confidence_target)[0]
    if ok.size == 0:
        raise ValueError(f"BER-CDF never reaches {confidence_target} on the given curve")
    i = int(ok[-1])
    x = float(eve_curve.xs[i])
    p_lower = 0.5 - delta

    bob_failure = None if bob_be_cdf is None else 1 - bob_be_cdf
    if bob_failure is not None and bob_failure <= BOB_NOISELESS_FAILURE + 1e-12:
        p_main = 0.0
    elif bob_ber is not None:
        p_main = min(0.5, float(bob_ber))
    else:
        p_main = 0.0

    kl = None
    if kl_points:
        valid = [p for p in kl_points if not p.degenerate]
        if valid:
            kl = min(valid, key=lambda p: abs(p.x - x)).kl_bits
    note = "inter-block interleaving across packets"
    if serial_corr is not None:
        note += f": lag-1 error correlation {serial_corr[0]:.4f} before, {serial_corr[1]:.4f} after"
    return EffectiveBscReport(
        delta=delta, p_wiretap_lower=p_lower, confidence=float(vals[i]), operating_point_db=x,
        p_main=p_main, c_s_bits=secrecy_capacity_bsc(p_main, p_lower), bob_block_failure=bob_failure,
        soft_info_kl=kl,
        serial_corr_before=None if serial_corr is None else serial_corr[0],
        serial_corr_after=None if serial_corr is None else serial_corr[1],
        independence_note=note,
    )


def interleaving_correlation(scenario, snr_db: float, packets: int, seed: int) -> tuple[float, float]:
    """Lag-1 error correlation of decoded message bits before/after block interleaving.

    Uses ``packets`` consecutive packets as the interleaver depth.
    """
    rng = sim.chunk_rng(seed, snr_db, 0, stream=0xB5C)
    rows = []
    kn = scenario.key_code.n
    keys, msgs, perms, cw, bits, _, _, _ = scenario._transmit(snr_db, packets, rng)
    key_hat, _, _ = bch_decode_batch(scenario.key_code, bits[:, :kn])
    rx_msg = bits[:, kn:scenario.ldpc.k]
    for b in range(packets):
        il = perms[b] if np.array_equal(key_hat[b], keys[b]) else interleaver_from_key(key_hat[b], scenario.message_bits)
        rows.append(rx_msg[b][il.inverse_permutation] != msgs[b])
    err = np.array(rows, dtype=np.uint8)
    return lag1_correlation(err), lag1_correlation(block_interleave(err))
