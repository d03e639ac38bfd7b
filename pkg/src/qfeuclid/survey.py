"""Prime scans with an on-disk cache, growth-count reports and fixture certification."""
from __future__ import annotations

import json
import math
import os
import struct
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from sympy import primerange

from .errors import PreconditionError, VerificationError
from .euclid import assignment_violations, certify_b2, motzkin_search, witness_box
from .field import make_field
from .ideals import Ideal, class_group, factor_prime
from .units import f_p

CACHE_VERSION = 1
CACHE_ENV = "QFEUCLID_CACHE_DIR"
LENSTRA_FIELDS = (-1, -2, -3, -5, -7, -11, -15)


# --- ideal specs ---------------------------------------------------------

def parse_ideal_spec(F, spec, G=None):
    """'unit', 'gen' (least-norm class-group generator) or an HNF triple 'a,b,c'."""
    spec = spec.strip().lower()
    if spec == "unit":
        return Ideal.unit(F)
    if spec == "gen":
        G = G or class_group(F)
        return G.generator or Ideal.unit(F)
    try:
        parts = [int(t) for t in spec.split(",")]
    except ValueError:
        raise PreconditionError(f"bad ideal spec {spec!r}") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3:
        raise PreconditionError(f"bad ideal spec {spec!r}: expected a,b,c")
    a, b, c = parts
    try:
        I = Ideal.from_hnf(F, a, b, c)
    except ValueError as e:
        raise PreconditionError(str(e)) from None
    # closed under multiplication by w iff b^2 + T b - N0 = 0 mod a
    if (b * b + F.T * b - F.N0) % a:
        raise PreconditionError(f"({a}, {b}) is not the HNF of an ideal")
    return I


# --- scan records --------------------------------------------------------

@dataclass(frozen=True)
class PrimeEntry:
    a: int
    b: int
    c: int
    norm: int
    cls: int
    f: int
    surjective: bool


@dataclass(frozen=True)
class ScanRecord:
    p: int
    split_type: str
    entries: tuple

    def payload(self):
        body = {"p": self.p, "split": self.split_type,
                "ideals": [[e.a, e.b, e.c, e.norm, e.cls, e.f, e.surjective] for e in self.entries]}
        return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_payload(cls, raw):
        body = json.loads(raw)
        return cls(body["p"], body["split"], tuple(PrimeEntry(*e) for e in body["ideals"]))


def compute_record(F, G, p):
    entries = []
    factors = factor_prime(p, F)
    for P, _ in factors:
        u = f_p(P)
        entries.append(PrimeEntry(P.a, P.b, P.c, P.norm, G.ideal_class(P), u.f, u.surjective))
    return ScanRecord(p, factors[0][0].kind, tuple(entries))


def _worker(d, primes):
    F = make_field(d)
    G = class_group(F)
    return [compute_record(F, G, p).payload() for p in primes]


# --- cache ---------------------------------------------------------------

def default_cache_dir():
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "qfeuclid"


class ScanCache:
    """Append-only record file: a JSON header line, then length|payload|crc32 frames."""

    def __init__(self, path, d):
        self.path = Path(path)
        self.d = d
        self.header = json.dumps({"kind": "qfeuclid-scan", "version": CACHE_VERSION, "d": d},
                                 sort_keys=True).encode() + b"\n"

    @classmethod
    def for_field(cls, cache_dir, d):
        return cls(Path(cache_dir) / f"scan_v{CACHE_VERSION}_d{d}.bin", d)

    def load(self):
        """(records by p, clean flag).  Damaged frames are dropped, not trusted."""
        try:
            raw = self.path.read_bytes()
        except FileNotFoundError:
            return {}, True
        except OSError as e:
            raise OSError(f"cannot read scan cache {self.path}: {e}") from e
        if not raw.startswith(self.header):
            return {}, False
        out = {}
        pos = len(self.header)
        clean = True
        while pos < len(raw):
            if pos + 4 > len(raw):
                clean = False
                break
            (n,) = struct.unpack_from(">I", raw, pos)
            end = pos + 4 + n + 4
            if end > len(raw):
                clean = False
                break
            payload = raw[pos + 4:pos + 4 + n]
            (crc,) = struct.unpack_from(">I", raw, pos + 4 + n)
            pos = end
            if zlib.crc32(payload) != crc:
                clean = False
                continue
            try:
                rec = ScanRecord.from_payload(payload)
            except (ValueError, KeyError, TypeError):
                clean = False
                continue
            out[rec.p] = payload
        return out, clean

    @staticmethod
    def frame(payload):
        return struct.pack(">I", len(payload)) + payload + struct.pack(">I", zlib.crc32(payload))

    def write_all(self, payloads):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        try:
            with open(tmp, "wb") as fh:
                fh.write(self.header)
                for p in sorted(payloads):
                    fh.write(self.frame(payloads[p]))
            os.replace(tmp, self.path)
        except OSError as e:
            raise OSError(f"cannot write scan cache {self.path}: {e}") from e

    def append(self, payloads):
        try:
            with open(self.path, "ab") as fh:
                for p in sorted(payloads):
                    fh.write(self.frame(payloads[p]))
        except OSError as e:
            raise OSError(f"cannot append to scan cache {self.path}: {e}") from e


def scan_records(d, X, jobs=1, cache_dir=None, use_cache=True):
    """ScanRecords for every rational prime p <= X, ascending."""
    F = make_field(d)
    G = class_group(F)
    primes = [int(p) for p in primerange(2, int(X) + 1)] if X >= 2 else []
    cache = ScanCache.for_field(cache_dir or default_cache_dir(), d) if use_cache else None
    have, clean = cache.load() if cache else ({}, True)
    missing = [p for p in primes if p not in have]
    fresh = {}
    if missing:
        if jobs > 1 and len(missing) > 1:
            # interleaved chunks balance large and small primes
            chunks = [missing[i::jobs * 4] for i in range(jobs * 4)]
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                for chunk, res in zip(chunks, ex.map(_worker, [d] * len(chunks), chunks)):
                    fresh.update(zip(chunk, res))
        else:
            fresh = {p: compute_record(F, G, p).payload() for p in missing}
    if cache:
        if not clean:
            cache.write_all({**have, **fresh})
        elif fresh:
            if not cache.path.exists():
                cache.write_all(fresh)
            else:
                cache.append(fresh)
    merged = {**have, **fresh}
    return [ScanRecord.from_payload(merged[p]) for p in primes]


# --- C-dependent view ----------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    p: int
    split_type: str
    ideal: tuple
    norm: int
    cls: int
    f: int
    surjective: bool
    divides_C: bool
    b1_member: bool


class CContext:
    def __init__(self, d, spec):
        self.F = make_field(d)
        self.G = class_group(self.F)
        self.C = parse_ideal_spec(self.F, spec, self.G)
        if not self.C.is_integral:
            raise PreconditionError("C must be integral")
        self.c_class = self.G.ideal_class(self.C)

    def divides_C(self, a, b, c):
        # an integral prime ideal contains C iff it divides C
        if self.C.norm % (a * c):
            return False
        return self.C.issubset(Ideal(self.F, a, b, c))

    def rows(self, rec):
        for e in rec.entries:
            dc = self.divides_C(e.a, e.b, e.c)
            b1 = (not dc) and e.surjective and (self.G.h == 1 or e.cls == self.c_class)
            yield ScanRow(rec.p, rec.split_type, (e.a, e.b, e.c), e.norm, e.cls, e.f,
                          e.surjective, dc, b1)


def scan(d, spec, X, jobs=1, cache_dir=None, use_cache=True):
    ctx = CContext(d, spec)
    out = []
    for rec in scan_records(d, X, jobs, cache_dir, use_cache):
        out.extend(ctx.rows(rec))
    return out


SCAN_COLUMNS = ("p", "split_type", "ideal", "norm", "class", "f", "surjective", "divides_C",
                "b1_member")


def scan_csv_lines(rows):
    yield ",".join(SCAN_COLUMNS)
    for r in rows:
        yield ",".join(str(v) for v in (r.p, r.split_type, ";".join(map(str, r.ideal)), r.norm,
                                       r.cls, r.f, int(r.surjective), int(r.divides_C),
                                       int(r.b1_member)))


# --- growth reports ------------------------------------------------------

@dataclass
class GrowthReport:
    kind: str
    d: int
    C: tuple
    h: int
    columns: tuple
    rows: list
    height: int | None = None

    def csv_lines(self):
        yield ",".join(self.columns)
        for r in self.rows:
            yield ",".join(str(v) for v in r)

    def to_json(self):
        body = {"kind": self.kind, "d": self.d, "C": list(self.C), "h": self.h,
                "height": self.height,
                "note": "reference columns are heuristic references, not asymptotic checks",
                "columns": list(self.columns), "rows": [list(r) for r in self.rows]}
        return json.dumps(body, sort_keys=True, indent=1)


def _fmt(x):
    return f"{x:.6f}"


def _grid(grid):
    grid = sorted({int(x) for x in grid})
    if not grid or grid[0] < 2:
        raise PreconditionError("grid points must be >= 2")
    return grid


def b1_count(d, spec, grid, jobs=1, cache_dir=None, use_cache=True):
    """Primes p with Nm(p) <= x in B_1 (class of C, units onto (O/p)^x), per x."""
    grid = _grid(grid)
    ctx = CContext(d, spec)
    rows = scan(d, spec, grid[-1], jobs, cache_dir, use_cache)
    norms = sorted(r.norm for r in rows if r.b1_member)
    out = []
    for x in grid:
        c = _count_le(norms, x)
        ref = x / math.log(x) ** 2
        out.append((x, c, _fmt(ref), _fmt(c / ref)))
    return GrowthReport("b1", d, ctx.C.hnf_triple(), ctx.G.h,
                        ("x", "b1_count", "heuristic_reference_x_over_log2x", "ratio"), out)


def _count_le(sorted_vals, x):
    import bisect
    return bisect.bisect_right(sorted_vals, x)


def b2_lower_bound(d, spec, grid, H, jobs=1, cache_dir=None, use_cache=True):
    """Certified count of p^-1 at B-level <= 2 over primes with Nm(p) <= x.

    Level-1 members come from the scan; other candidates get a bounded-height
    witness search (certify_b2).  Uncertified primes are not claimed absent.
    """
    grid = _grid(grid)
    ctx = CContext(d, spec)
    F, C, G = ctx.F, ctx.C, ctx.G
    rows = scan(d, spec, grid[-1], jobs, cache_dir, use_cache)
    b1 = {r.ideal for r in rows if r.b1_member}
    box = witness_box(C, H)
    records = {}
    for r in rows:
        records.setdefault(r.norm, []).append(r)

    def b1_test(q):
        if q.norm <= grid[-1]:
            return q.hnf_triple() in b1
        # outside the scanned range: decide directly
        return (G.h == 1 or G.ideal_class(q) == ctx.c_class) and f_p(q).surjective

    c2_class = (2 * ctx.c_class) % G.h
    b1_norms, b2_norms = [], []
    for r in rows:
        if r.divides_C or r.norm > grid[-1]:
            continue
        if r.b1_member:
            b1_norms.append(r.norm)
            b2_norms.append(r.norm)
            continue
        # a new level-2 prime lands every class on B_1 primes, so [p] = [C^2]
        if G.h > 1 and r.cls != c2_class:
            continue
        P = next(P for P, _ in factor_prime(r.p, F) if P.hnf_triple() == r.ideal)
        if certify_b2(P, C, box, b1_test) is not None:
            b2_norms.append(r.norm)
    b1_norms.sort()
    b2_norms.sort()
    out = []
    for x in grid:
        c1, c2 = _count_le(b1_norms, x), _count_le(b2_norms, x)
        ref = x / (G.h * math.log(x))
        out.append((x, c1, c2, _fmt(ref), _fmt(c2 / ref)))
    return GrowthReport("b2", d, C.hnf_triple(), G.h,
                        ("x", "b1_count", "b2_certified", "heuristic_reference_x_over_h_log_x",
                         "ratio"), out, H)


# --- Lenstra fixtures ----------------------------------------------------

@dataclass
class FixtureResult:
    d: int
    h: int
    C: tuple
    total: int
    assigned: int
    max_level: int
    covered: bool
    verified: bool
    unassigned: list

    def to_dict(self):
        return {"d": self.d, "h": self.h, "C": list(self.C), "total": self.total,
                "assigned": self.assigned, "max_level": self.max_level,
                "covered": self.covered, "verified": self.verified,
                "unassigned": [list(t) for t in self.unassigned]}


def certify_field(d, spec="gen", B=30, H=20, k=6):
    ctx = CContext(d, spec)
    L = motzkin_search(ctx.C, ctx.G, B, H, k, mode="E")
    bad = assignment_violations(L)
    if bad:
        raise VerificationError(f"d={d}: {bad[0]}")
    assigned = len(L.levels)
    unassigned = sorted(L.unassigned)
    return FixtureResult(d, ctx.G.h, ctx.C.hnf_triple(), assigned + len(unassigned), assigned,
                         max(L.levels.values(), default=0), not unassigned, True,
                         [J.hnf_triple() for J in unassigned]), L


def certify_fixtures(B=30, H=20, k=6, fields=LENSTRA_FIELDS):
    return [certify_field(d, "gen", B, H, k)[0] for d in fields]
