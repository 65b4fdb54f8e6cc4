"""Command-line front end: session files, command dispatch, deterministic
text reports.

A session file declares the ring, the slope and named blocks::

    ring zp p=5 prec=20
    slope 0/1
    matrix A 1 2
    25 ; 5*u^3
    series f
    1 - u !
    vector v
    5 ; u

Series literals are polynomials ``c*u^k + ...`` with integer coefficients
(zp backend) or polynomials in t (fq backend, parenthesized inside
products); a trailing ``!`` marks the literal as exactly known, otherwise
coefficients carry the header pi-precision.  Commands print canonical forms
only, so reports are byte-stable across runs; failures print the structured
error name.  Exit codes: 0 success, 2 certified-precision failure, 1 usage
error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction

from .coeffs import CoeffElem, FqConfig, ZpConfig
from .contfrac import Slope, best_approx_denominators, cf_expand
from .errors import AlgebraError, ParseError, PrecisionExhausted, RequiresExactInput
from .localized import SMat, hnf_pi, hnf_u
from .maxmod import MLModule, max_module, max_sum_ml, scalar_extend
from .pairrep import pair_intersect, pair_max_sum, psi, saturate
from .precise_sum import GapCertificate, approx_max_sum
from .series import SnuSeries, euclid_div, gcd_extended


class SessionFile:
    def __init__(self, cfg, slope, blocks, block_order):
        self.cfg = cfg
        self.slope = slope
        self.blocks = blocks
        self.block_order = block_order

    def matrix(self, name) -> SMat:
        kind, value, tag = self._get(name)
        if kind != "matrix":
            raise ParseError(f"block '{name}' is a {kind}, not a matrix")
        return value

    def series(self, name) -> SnuSeries:
        kind, value, tag = self._get(name)
        if kind != "series":
            raise ParseError(f"block '{name}' is a {kind}, not a series")
        return value

    def vector(self, name):
        kind, value, tag = self._get(name)
        if kind != "vector":
            raise ParseError(f"block '{name}' is a {kind}, not a vector")
        return value

    def tag(self, name):
        return self._get(name)[2]

    def _get(self, name):
        if name not in self.blocks:
            raise ParseError(f"no block named '{name}'")
        return self.blocks[name]

    def render(self) -> str:
        lines = []
        if self.cfg.kind == "zp":
            lines.append(f"ring zp p={self.cfg.p} prec={self.cfg.default_prec}")
        else:
            lines.append(f"ring fq q={self.cfg.q} prec={self.cfg.default_prec}")
        lines.append(f"slope {self.slope.beta}/{self.slope.alpha}")
        for name in self.block_order:
            kind, value, tag = self.blocks[name]
            if kind == "matrix":
                head = f"matrix {name} {value.rows} {value.cols}"
                if tag:
                    head += f" @{tag}"
                lines.append(head)
                for i in range(value.rows):
                    lines.append(" ; ".join(_render_literal(e) for e in value.a[i]))
            elif kind == "vector":
                lines.append(f"vector {name}")
                lines.append(" ; ".join(_render_literal(e) for e in value))
            else:
                lines.append(f"series {name}")
                lines.append(_render_literal(value))
        return "\n".join(lines) + "\n"


def _render_literal(e: SnuSeries) -> str:
    parts = []
    cfg = e.cfg
    for i in sorted(e.coeffs):
        c = e.coeffs[i]
        lift = c.unit[0] if c.unit else None
        if lift is None:
            continue
        value = cfg.exa_shift_pi(lift, c.num_val) if cfg.kind == "zp" else lift.shift(c.num_val)
        if cfg.kind == "zp":
            cs = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        else:
            cs = repr(value)
            if "+" in cs or "*" in cs:
                cs = f"({cs})"
        if i == 0:
            parts.append(cs)
        else:
            head = "u" if i == 1 else f"u^{i}"
            parts.append(head if cs == "1" else f"{cs}*{head}")
    body = " + ".join(parts) if parts else "0"
    if e.is_exact():
        body += " !"
    return body


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^(?:(?P<coef>\([^()]*\)|[^*\s]+)\s*\*\s*)?u(?:\^(?P<exp>-?\d+))?$")


def _parse_coef(cfg, text, lineno):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if cfg.kind == "zp":
        m = re.fullmatch(r"(-?\d+)(?:/(\d+))?", text)
        if not m:
            raise ParseError(f"bad coefficient '{text}'", lineno)
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        return Fraction(num, den)
    # fq backend: polynomial in t
    value = cfg.exa_zero()
    for part in re.split(r"(?=[+-])", text.replace(" ", "")):
        if not part or part in "+-":
            continue
        sign = -1 if part.startswith("-") else 1
        part = part.lstrip("+-")
        m = re.fullmatch(r"(?:(\d+)\*?)?(?:t(?:\^(\d+))?)?", part)
        if not m or (m.group(1) is None and "t" not in part):
            m2 = re.fullmatch(r"(\d+)", part)
            if not m2:
                raise ParseError(f"bad coefficient '{text}'", lineno)
        c = int(m.group(1)) if m.group(1) else 1
        k = 0
        if "t" in part:
            k = int(m.group(2)) if m.group(2) else 1
        mono = cfg.exa_shift_pi(cfg.exa_from_int(sign * c), k)
        value = cfg.exa_add(value, mono)
    return value


def parse_series_literal(cfg, slope, text, lineno=None, prec=None) -> SnuSeries:
    text = text.strip()
    exact = text.endswith("!")
    if exact:
        text = text[:-1].strip()
    if prec is None:
        prec = cfg.default_prec
    # split into signed terms at top-level +/- (minus binds to the next term)
    chunks = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == "+":
            chunks.append(cur)
            cur = ""
        elif (
            depth == 0
            and ch == "-"
            and cur.strip()
            and not cur.rstrip().endswith(("^", "*", "(", "+", "-"))
        ):
            chunks.append(cur)
            cur = "-"
        else:
            cur += ch
    chunks.append(cur)
    coeffs = {}
    for chunk in chunks:
        chunk = chunk.replace(" ", "")
        if not chunk or chunk == "0":
            continue
        negate = False
        body = chunk
        m = _TERM_RE.match(body)
        if m is None and body.startswith("-"):
            m = _TERM_RE.match(body[1:].strip())
            if m:
                negate = True
        if m:
            exp = int(m.group("exp")) if m.group("exp") else 1
            coef_text = m.group("coef") or "1"
        else:
            exp = 0
            coef_text = body
        if cfg.kind == "zp":
            val = _parse_coef(cfg, coef_text, lineno)
            if negate:
                val = -val
            c = CoeffElem.from_rational(cfg, val.numerator, val.denominator)
        else:
            val = _parse_coef(cfg, coef_text, lineno)
            if negate:
                val = cfg.exa_neg(val)
            if cfg.exa_is_zero(val):
                continue
            c = CoeffElem.from_exact(cfg, val)
        if c.is_exact_zero():
            continue
        coeffs[exp] = coeffs[exp] + c if exp in coeffs else c
    x = SnuSeries(cfg, slope, coeffs)
    if not exact:
        x = x.reduce_levels(Fraction(prec))
    return x


def parse_session(text: str) -> SessionFile:
    cfg = None
    slope = None
    blocks = {}
    order = []
    lines = text.splitlines()
    i = 0

    def strip(line):
        return line.split("#", 1)[0].strip()

    while i < len(lines):
        line = strip(lines[i])
        lineno = i + 1
        i += 1
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head == "ring":
            if len(words) < 2 or words[1] not in ("zp", "fq"):
                raise ParseError(f"unknown ring kind '{' '.join(words[1:2])}'", lineno)
            params = dict(w.split("=", 1) for w in words[2:] if "=" in w)
            prec = int(params.get("prec", 20))
            if words[1] == "zp":
                cfg = ZpConfig(int(params["p"]), prec)
            else:
                cfg = FqConfig(int(params["q"]), prec)
        elif head == "slope":
            b, a = words[1].split("/")
            slope = Slope(int(b), int(a))
        elif head in ("matrix", "vector", "series"):
            if cfg is None or slope is None:
                raise ParseError("header (ring, slope) must precede blocks", lineno)
            name = words[1]
            if name in blocks:
                raise ParseError(f"duplicate block name '{name}'", lineno)
            tag = None
            for w in words[2:]:
                if w.startswith("@"):
                    tag = w[1:]
            if head == "matrix":
                rows, cols = int(words[2]), int(words[3])
                entries = []
                for r in range(rows):
                    if i >= len(lines):
                        raise ParseError("unexpected end of matrix block", lineno)
                    row_text = strip(lines[i])
                    i += 1
                    cells = [c for c in row_text.split(";")]
                    if len(cells) != cols:
                        raise ParseError(
                            f"expected {cols} entries, found {len(cells)}", i
                        )
                    entries.append(
                        [parse_series_literal(cfg, slope, c, i) for c in cells]
                    )
                blocks[name] = ("matrix", SMat(cfg, slope, entries), tag)
            elif head == "vector":
                row_text = strip(lines[i])
                i += 1
                cells = row_text.split(";")
                blocks[name] = (
                    "vector",
                    [parse_series_literal(cfg, slope, c, i) for c in cells],
                    tag,
                )
            else:
                body = strip(lines[i])
                i += 1
                blocks[name] = ("series", parse_series_literal(cfg, slope, body, i), tag)
            order.append(name)
        else:
            raise ParseError(f"unknown directive '{head}'", lineno)
    if cfg is None or slope is None:
        raise ParseError("session must declare ring and slope")
    return SessionFile(cfg, slope, blocks, order)


# ---------------------------------------------------------------------------
# command execution
# ---------------------------------------------------------------------------


def _fmt_matrix(M: SMat) -> str:
    return "[" + "; ".join(", ".join(e.render() for e in row) for row in M.a) + "]"


def _fmt_ml(ml: MLModule) -> str:
    lines = [f"M = {_fmt_matrix(ml.as_matrix())}", f"L = {ml.L}"]
    for j, sched in enumerate(ml.schedules()):
        seqs = " ".join(f"({f},{d},{n})" for f, d, n in sched.sequences)
        lines.append(f"schedule[{j}] = {seqs}")
    return "\n".join(lines)


def _fmt_pair(P) -> str:
    vals = " ".join(str(v) for v in P.b_vals)
    return f"A = {_fmt_matrix(P.A)}\nB = {_fmt_matrix(P.B)}\npivots_u = [{vals}]"


def run_command(cmd, session: SessionFile) -> str:
    """Execute one command against a parsed session, returning the report."""
    name = cmd[0]
    args = cmd[1:]
    prec = session.cfg.default_prec
    if name == "hnf":
        M = session.matrix(args[0])
        tag = session.tag(args[0]) or "pi"
        if tag == "pi":
            ech = hnf_pi(M, prec)
            piv = ", ".join(p.render() for p in ech.pivots)
            return f"T = {_fmt_matrix(ech.T)}\nrows = {ech.pivot_rows}\npivots = [{piv}]"
        ech = hnf_u(M, prec)
        vals = ", ".join(str(v) for v in ech.pivot_vals)
        return f"T = {_fmt_matrix(ech.T)}\nrows = {ech.pivot_rows}\npivots_u = [{vals}]"
    if name == "max":
        ml, _ = max_module(session.matrix(args[0]), prec)
        return _fmt_ml(ml)
    if name == "sum":
        a, _ = max_module(session.matrix(args[0]), prec)
        b, _ = max_module(session.matrix(args[1]), prec)
        return _fmt_ml(max_sum_ml(a, b, prec))
    if name == "intersect":
        Pa = psi(session.matrix(args[0]), prec)
        Pb = psi(session.matrix(args[1]), prec)
        return _fmt_pair(pair_intersect(Pa, Pb, prec))
    if name == "pair":
        return _fmt_pair(psi(session.matrix(args[0]), prec))
    if name == "eq":
        Pa = psi(session.matrix(args[0]), prec)
        Pb = psi(session.matrix(args[1]), prec)
        return "EQUAL" if Pa.equal(Pb) else "DIFFERENT"
    if name == "saturate":
        P = psi(session.matrix(args[0]), prec)
        return _fmt_pair(saturate(P, prec))
    if name == "extend":
        opts = _opts(args[1:])
        b, a = opts["to"].split("/")
        ml, _ = max_module(session.matrix(args[0]), prec)
        return _fmt_ml(scalar_extend(ml, Slope(int(b), int(a))))
    if name == "approx-sum":
        opts = _opts(args[2:])
        cert = GapCertificate(
            int(opts["c"]), int(opts["pu"]), int(opts["ppi"]),
            session.matrix(args[1]).cols,
        )
        ml = approx_max_sum(
            session.matrix(args[0]), session.matrix(args[1]), cert, prec
        )
        return f"slope = {ml.slope}\n" + _fmt_ml(ml)
    if name == "cf":
        num, den = args[0].split("/")
        x = Fraction(int(num), int(den))
        cf = cf_expand(x)
        opts = _opts(args[1:])
        out = [f"cf = {cf!r}"]
        out.append("convergents = " + " ".join(f"{p}/{q}" for p, q in zip(cf.p, cf.q)))
        if "gamma" in opts:
            sched = best_approx_denominators(x, int(opts["gamma"]))
            out.append(
                "schedule = " + " ".join(f"({f},{d},{n})" for f, d, n in sched.sequences)
            )
        return "\n".join(out)
    if name == "divmod":
        opts = _opts(args[2:])
        q, r = euclid_div(
            session.series(args[0]), session.series(args[1]),
            Fraction(opts.get("prec", prec)),
        )
        return f"q = {q.render()}\nr = {r.render()}"
    if name == "gcd":
        g, k, l, m, n = gcd_extended(session.series(args[0]), session.series(args[1]))
        return f"g = {g.render()}\nk = {k.render()}\nl = {l.render()}"
    raise ParseError(f"unknown command '{name}'")


def _opts(args):
    out = {}
    i = 0
    while i < len(args):
        a = args[i]
        if a.startswith("--"):
            out[a[2:]] = args[i + 1]
            i += 2
        else:
            i += 1
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="slomod",
        description="exact linear algebra over pi-adically convergent series rings",
    )
    parser.add_argument("command", help="hnf max sum intersect pair eq saturate extend approx-sum cf divmod gcd")
    parser.add_argument("session", nargs="?", help="session file (not needed for cf)")
    parser.add_argument("args", nargs="*", help="block names and options")
    parser.add_argument("--prec", type=int, default=None, help="override default precision")
    ns, extra = parser.parse_known_args(argv)
    try:
        if ns.command == "cf":
            tail = ([ns.session] if ns.session else []) + ns.args + extra
            session = SessionFile(ZpConfig(2, 20), Slope(0, 1), {}, [])
            print(run_command(["cf"] + tail, session))
            return 0
        if not ns.session:
            print("error: session file required", file=sys.stderr)
            return 1
        with open(ns.session, encoding="utf-8") as fh:
            session = parse_session(fh.read())
        if ns.prec is not None:
            session.cfg.default_prec = ns.prec
        env_prec = os.environ.get("SLOMOD_PREC")
        if env_prec and ns.prec is None:
            session.cfg.default_prec = int(env_prec)
        print(run_command([ns.command] + ns.args + extra, session))
        return 0
    except (PrecisionExhausted, RequiresExactInput) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except AlgebraError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, IndexError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
