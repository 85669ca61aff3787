"""Concrete models of towers of finite fields F_{q^d}, q = p^s.

Each level d is F_p[x]/(f) where f is the first irreducible monic polynomial
of degree s*d in ascending code order (digit i of the code is the x^i
coefficient).  Elements are integer codes with the same digit convention.

Levels carry multiplicative generators chosen compatibly: the generator g_d
satisfies pi_e(g_d^{(q^d-1)/(q^e-1)}) = 0 for the minimal polynomial pi_e of
every lower generator g_e, which makes g_e^j |-> g_d^{j*(q^d-1)/(q^e-1)} an
actual field embedding.  Norms, traces and embeddings then reduce to index
arithmetic on discrete logs.
"""

from __future__ import annotations

import math
import os
import struct
import zlib
from array import array
from dataclasses import dataclass

from charsum._intutil import divisors, factorize, prime_divisors
from charsum.errors import InternalCheckError, SchemaError, SizeBoundError

_MAGIC = b"CHARSUMDL1"
_NO_LOG = 0xFFFFFFFF


# --------------------------------------------------- polynomials over F_p
# dense little-endian coefficient lists


def _pm_trim(f):
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def _pm_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pm_trim(out)


def _pm_rem(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            a[i] = 0
            for j in range(df):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _pm_trim(a[:df]) if df > 0 else [0]


def _pm_sub(a, b, p):
    n = max(len(a), len(b))
    return _pm_trim([((a[i] if i < len(a) else 0)
                      - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pm_powmod(a, e, f, p):
    r = [1]
    b = _pm_rem(a, f, p)
    while e:
        if e & 1:
            r = _pm_rem(_pm_mul(r, b, p), f, p)
        e >>= 1
        if e:
            b = _pm_rem(_pm_mul(b, b, p), f, p)
    return r


def _pm_gcd(a, b, p):
    a = _pm_trim(list(a))
    b = _pm_trim(list(b))
    while b != [0]:
        inv = pow(b[-1], -1, p)
        bm = [(c * inv) % p for c in b]
        a, b = bm, _pm_rem(a, bm, p)
    return a


def _is_irreducible(f, p):
    m = len(f) - 1
    if m == 1:
        return True
    x = [0, 1]
    if _pm_sub(_pm_powmod(x, p ** m, f, p), x, p) != [0]:
        return False
    for r in prime_divisors(m):
        h = _pm_sub(_pm_powmod(x, p ** (m // r), f, p), x, p)
        if len(_pm_gcd(f, h, p)) != 1:
            return False
    return True


def _decode(code, p, m):
    out = []
    for _ in range(m):
        code, r = divmod(code, p)
        out.append(r)
    return out


def _encode(digits, p):
    out = 0
    for c in reversed(digits):
        out = out * p + c
    return out


def _first_irreducible(p, m):
    for low in range(p ** m):
        f = _decode(low, p, m) + [1]
        if _is_irreducible(f, p):
            return f
    raise InternalCheckError("no irreducible polynomial found")


# ------------------------------------------------------------------ levels


class _Level:
    __slots__ = ("d", "m", "n", "modulus", "gen", "minpoly", "fact_n",
                 "exp_table", "log_table", "abs_tr", "_baby", "_giant", "_m0")

    def __init__(self):
        self.exp_table = None
        self.log_table = None
        self.abs_tr = None
        self._baby = None


@dataclass
class TowerConfig:
    p: int
    s: int = 1
    dlog_table_max: int = 2 ** 16
    size_bound: int = 2 ** 22
    cache_dir: str | None = None  # falls back to $CHARSUM_CACHE_DIR


class FieldTower:
    def __init__(self, config: TowerConfig):
        p = config.p
        if p < 2 or factorize(p) != ((p, 1),):
            raise SchemaError(f"p = {p} is not prime")
        if config.s < 1:
            raise SchemaError(f"s = {config.s} must be positive")
        self.config = config
        self.p = p
        self.s = config.s
        self.q = p ** config.s
        self._levels: dict[int, _Level] = {}

    @property
    def cache_dir(self):
        if self.config.cache_dir is not None:
            return self.config.cache_dir
        return os.environ.get("CHARSUM_CACHE_DIR")

    # ---- level management

    def level(self, d: int) -> _Level:
        lv = self._levels.get(d)
        if lv is None:
            if d < 1:
                raise SchemaError(f"degree {d} must be positive")
            for e in divisors(d):
                if e not in self._levels:
                    self._levels[e] = self._build_level(e)
            lv = self._levels[d]
        return lv

    def degrees(self):
        return tuple(sorted(self._levels))

    def order(self, d: int) -> int:
        return self.level(d).n + 1

    def group_order(self, d: int) -> int:
        return self.level(d).n

    def modulus(self, d: int):
        return tuple(self.level(d).modulus)

    def generator(self, d: int) -> int:
        return self.level(d).gen

    def _build_level(self, d: int) -> _Level:
        m = self.s * d
        size = self.p ** m
        if size > self.config.size_bound:
            raise SizeBoundError(
                f"field of order {self.p}^{m} exceeds size bound "
                f"{self.config.size_bound}")
        lv = _Level()
        lv.d = d
        lv.m = m
        lv.n = size - 1
        lv.modulus = _first_irreducible(self.p, m)
        lv.fact_n = factorize(lv.n) if lv.n > 1 else ()
        h = self._first_generator(lv)
        lv.gen = self._compatible_generator(lv, h)
        if size <= self.config.dlog_table_max:
            self._attach_tables(lv)
        lv.minpoly = self._minimal_polynomial(lv)
        return lv

    # ---- raw polynomial-model arithmetic (used at build time / BSGS mode)

    def _raw_mul(self, lv, a, b):
        if a == 0 or b == 0:
            return 0
        prod = _pm_mul(_decode(a, self.p, lv.m), _decode(b, self.p, lv.m),
                       self.p)
        return _encode(_pm_rem(prod, lv.modulus, self.p), self.p)

    def _raw_pow(self, lv, a, e):
        if a == 0:
            assert e > 0
            return 0
        return _encode(
            _pm_powmod(_decode(a, self.p, lv.m), e, lv.modulus, self.p),
            self.p)

    def _first_generator(self, lv):
        for c in range(1, lv.n + 1):
            if all(self._raw_pow(lv, c, lv.n // r) != 1
                   for r, _ in lv.fact_n):
                return c
        raise InternalCheckError("no multiplicative generator found")

    def _compatible_generator(self, lv, h):
        proper = [e for e in divisors(lv.d) if e != lv.d]
        if not proper:
            return h
        targets = [(lv.n // self._levels[e].n, self._levels[e].minpoly)
                   for e in proper]
        for k in range(1, lv.n + 1):
            if math.gcd(k, lv.n) != 1:
                continue
            cand = self._raw_pow(lv, h, k)
            if all(self._eval_int_poly_is_zero(lv, pi,
                                               self._raw_pow(lv, cand, quot))
                   for quot, pi in targets):
                return cand
        raise InternalCheckError("no compatible generator found")

    def _eval_int_poly_is_zero(self, lv, pi, y):
        acc = 0
        for c in reversed(pi):
            acc = self.add(lv.d, self._raw_mul(lv, acc, y), c)
        return acc == 0

    def _minimal_polynomial(self, lv):
        # prod over Frobenius conjugates of the generator; coefficients must
        # land in F_p since the generator is a primitive element
        conjs = []
        cur = lv.gen
        for _ in range(lv.m):
            conjs.append(cur)
            cur = self._raw_pow(lv, cur, self.p)
        assert cur == lv.gen
        poly = [1]
        for r in conjs:
            neg_r = self.neg(lv.d, r)
            new = [0] * (len(poly) + 1)
            for i, c in enumerate(poly):
                new[i + 1] = self.add(lv.d, new[i + 1], c)
                new[i] = self.add(lv.d, new[i], self._raw_mul(lv, c, neg_r))
            poly = new
        for c in poly:
            assert c < self.p, "minimal polynomial not over the prime field"
        return tuple(poly)

    # ---- discrete log tables and their disk cache

    def _dlog_cache_path(self, lv):
        dirp = self.cache_dir
        if not dirp:
            return None
        mod_low = _encode(lv.modulus[:-1], self.p)
        name = f"dlog_p{self.p}_s{self.s}_d{lv.d}_{mod_low}.bin"
        return os.path.join(dirp, name)

    def _attach_tables(self, lv):
        log = self._load_dlog_cache(lv)
        fresh = log is None
        if fresh:
            exp = [0] * lv.n
            cur = 1
            for i in range(lv.n):
                exp[i] = cur
                cur = self._raw_mul(lv, cur, lv.gen)
            assert cur == 1 and len(set(exp)) == lv.n
            log = array("I", bytes(4 * (lv.n + 1)))
            log[0] = _NO_LOG
            for i, code in enumerate(exp):
                log[code] = i
        else:
            exp = [0] * lv.n
            for code in range(1, lv.n + 1):
                exp[log[code]] = code
            if exp[0] != 1 or (lv.n > 1 and exp[1] != lv.gen):
                self._attach_tables_fresh_fallback(lv)
                return
        lv.exp_table = exp
        lv.log_table = log
        if fresh:
            self._write_dlog_cache(lv)

    def _attach_tables_fresh_fallback(self, lv):
        # cached table failed sanity checks; rebuild from scratch
        path = self._dlog_cache_path(lv)
        if path:
            try:
                os.remove(path)
            except OSError:
                pass
        self._attach_tables(lv)

    def _load_dlog_cache(self, lv):
        path = self._dlog_cache_path(lv)
        if not path:
            return None
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
            hdr = len(_MAGIC) + 40 + 4
            if blob[:len(_MAGIC)] != _MAGIC or len(blob) != hdr + 4 * (lv.n + 1):
                return None
            p, s, d, mod_low, n = struct.unpack_from("<5Q", blob, len(_MAGIC))
            (crc,) = struct.unpack_from("<I", blob, len(_MAGIC) + 40)
            if (p, s, d, n) != (self.p, self.s, lv.d, lv.n):
                return None
            if mod_low != _encode(lv.modulus[:-1], self.p):
                return None
            payload = blob[hdr:]
            if zlib.crc32(payload) != crc:
                return None
            log = array("I")
            log.frombytes(payload)
            if log[0] != _NO_LOG or any(v >= lv.n for v in log[1:]):
                return None
            return log
        except (OSError, ValueError, struct.error):
            return None

    def _write_dlog_cache(self, lv):
        path = self._dlog_cache_path(lv)
        if not path:
            return
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            payload = lv.log_table.tobytes()
            mod_low = _encode(lv.modulus[:-1], self.p)
            blob = (_MAGIC
                    + struct.pack("<5Q", self.p, self.s, lv.d, mod_low, lv.n)
                    + struct.pack("<I", zlib.crc32(payload))
                    + payload)
            tmp = path + ".tmp"
            with open(tmp, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, path)
        except OSError:
            pass

    # ---- element arithmetic (codes)

    def from_int(self, c: int) -> int:
        return c % self.p

    def minus_one(self) -> int:
        return self.p - 1 if self.p > 2 else 1

    def add(self, d, a, b):
        p = self.p
        if p == 2:
            return a ^ b
        out = 0
        mult = 1
        while a or b:
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, d, a):
        p = self.p
        if p == 2:
            return a
        out = 0
        mult = 1
        while a:
            r = a % p
            if r:
                out += (p - r) * mult
            a //= p
            mult *= p
        return out

    def sub(self, d, a, b):
        return self.add(d, a, self.neg(d, b))

    def mul(self, d, a, b):
        if a == 0 or b == 0:
            return 0
        lv = self.level(d)
        if lv.log_table is not None:
            return lv.exp_table[(lv.log_table[a] + lv.log_table[b]) % lv.n]
        return self._raw_mul(lv, a, b)

    def inv(self, d, a):
        assert a != 0
        lv = self.level(d)
        if lv.log_table is not None:
            return lv.exp_table[(-lv.log_table[a]) % lv.n]
        return self._raw_pow(lv, a, lv.n - 1)

    def pow_elem(self, d, a, k):
        if a == 0:
            assert k > 0
            return 0
        lv = self.level(d)
        if k < 0:
            a = self.inv(d, a)
            k = -k
        if lv.log_table is not None:
            return lv.exp_table[(lv.log_table[a] * k) % lv.n]
        return self._raw_pow(lv, a, k % lv.n if lv.n > 1 else 1)

    def exp(self, d, k):
        lv = self.level(d)
        if lv.exp_table is not None:
            return lv.exp_table[k % lv.n]
        return self._raw_pow(lv, lv.gen, k % lv.n if lv.n > 1 else 1)

    def log(self, d, a):
        assert a != 0
        lv = self.level(d)
        if lv.log_table is not None:
            return int(lv.log_table[a])
        return self._bsgs_log(lv, a)

    def _bsgs_log(self, lv, a):
        if lv._baby is None:
            m0 = math.isqrt(lv.n) + 1
            baby = {}
            cur = 1
            for j in range(m0):
                baby.setdefault(cur, j)
                cur = self._raw_mul(lv, cur, lv.gen)
            lv._baby = baby
            lv._m0 = m0
            lv._giant = self._raw_pow(lv, lv.gen, lv.n - (m0 % lv.n))
        y = a
        for i in range(lv._m0 + 1):
            j = lv._baby.get(y)
            if j is not None:
                return (i * lv._m0 + j) % lv.n
            y = self._raw_mul(lv, y, lv._giant)
        raise InternalCheckError("discrete log not found")

    def exp_table(self, d):
        """Codes g^0, g^1, ... in exponent order, or None without tables."""
        return self.level(d).exp_table

    def iter_generator_powers(self, d):
        lv = self.level(d)
        if lv.exp_table is not None:
            yield from lv.exp_table
            return
        cur = 1
        for _ in range(lv.n):
            yield cur
            cur = self._raw_mul(lv, cur, lv.gen)

    # ---- maps between levels

    def embed(self, e, d, a):
        assert d % e == 0
        if a == 0:
            return 0
        lvd = self.level(d)
        lve = self.level(e)
        return self.exp(d, self.log(e, a) * (lvd.n // lve.n))

    def norm_to(self, d, e, a):
        assert d % e == 0
        if a == 0:
            return 0
        lve = self.level(e)
        self.level(d)
        return self.exp(e, self.log(d, a) % lve.n)

    def trace_to(self, d, e, a):
        assert d % e == 0
        if a == 0:
            return 0
        lvd = self.level(d)
        lve = self.level(e)
        qe = self.q ** e
        acc = 0
        cur = a
        for _ in range(d // e):
            acc = self.add(d, acc, cur)
            cur = self.pow_elem(d, cur, qe)
        assert cur == a
        if acc == 0:
            return 0
        stride = lvd.n // lve.n
        la = self.log(d, acc)
        assert la % stride == 0, "trace left the subfield"
        return self.exp(e, la // stride)

    def absolute_trace(self, d, a):
        """Trace down to F_p; the result is an integer in [0, p)."""
        if a == 0:
            return 0
        lv = self.level(d)
        acc = 0
        cur = a
        for _ in range(lv.m):
            acc = self.add(d, acc, cur)
            cur = self.pow_elem(d, cur, self.p)
        assert cur == a
        assert acc < self.p, "absolute trace not in the prime field"
        return acc

    def absolute_trace_table(self, d):
        lv = self.level(d)
        if lv.abs_tr is None:
            p = self.p
            basis = [self.absolute_trace(d, p ** j) for j in range(lv.m)]
            tab = [0]
            for j in range(lv.m):
                bj = basis[j]
                cur = tab
                tab = []
                for c in range(p):
                    off = (c * bj) % p
                    tab.extend([(t + off) % p for t in cur])
            lv.abs_tr = tab
        return lv.abs_tr


def build_tower(p, s=1, degrees=(1,), *, dlog_table_max=2 ** 16,
                size_bound=2 ** 22, cache_dir=None) -> FieldTower:
    tower = FieldTower(TowerConfig(p=p, s=s, dlog_table_max=dlog_table_max,
                                   size_bound=size_bound,
                                   cache_dir=cache_dir))
    for d in degrees:
        tower.level(d)
    return tower
