"""Command-line front end.

Subcommands chain into reproducible file-based pipelines::

    blocktrid generate --family companion --coeffs 1,0,0,0,1 --out work/
    blocktrid reduce work/ --out red/
    blocktrid spy red/T.mtx
    blocktrid qr-track red/A_trid.mtx red/C_trid.mtx --steps 30 --out track.json
    blocktrid verify work/A.mtx work/C.mtx --k 2

Exit codes: 0 success, 2 verification failure, 3 I/O error, 4 contract
violation.  All reports are JSON with a fixed schema version and relative
residuals; complex numbers are encoded as [real, imag] pairs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .almostnormal import (
    ConicCoefficients,
    antihermitian_rescaling,
    certify,
    rotate_leading_form,
    starting_block_curve,
    starting_block_rank_one,
)
from .errors import (
    ConicFitError,
    ContractError,
    DimensionError,
    GenerationError,
    LinearVarietyError,
    SingularityError,
    SolverFailure,
)
from .generators import (
    arrow_hermitian_plus_rank_one,
    chebyshev_colleague,
    companion,
    curve_normal_plus_rank_one,
    fourier_sum,
    random_unitary_plus_rank_one,
    solve_commutator_equation,
)
from .lanczos import block_lanczos
from .matcore import commutator, fro, hermitian_part, orthonormal_range
from .mmio import MatrixMarketError, read_matrix, read_vector, write_matrix, write_vector
from .structure import qr_iteration_tracked

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_IO = 3
EXIT_CONTRACT = 4

_CLI_FAMILIES = (
    "arrow",
    "companion",
    "colleague",
    "fourier-sum",
    "curve",
    "unitary",
    "solved",
)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _conic_to_json(c: ConicCoefficients) -> dict:
    return {
        "a20": _cplx(c.a20),
        "a11": _cplx(c.a11),
        "a02": _cplx(c.a02),
        "a10": _cplx(c.a10),
        "a01": _cplx(c.a01),
        "a00": _cplx(c.a00),
        "real_form": list(c.real_form),
        "theta": c.theta,
        "max_residual": c.max_residual,
        "degenerate_fit": c.degenerate_fit,
    }


def _conic_from_json(d: dict) -> ConicCoefficients:
    def z(key):
        re, im = d[key]
        return complex(re, im)

    return ConicCoefficients(
        a20=z("a20"),
        a11=z("a11"),
        a02=z("a02"),
        a10=z("a10"),
        a01=z("a01"),
        a00=z("a00"),
        real_form=tuple(d["real_form"]),
        theta=d["theta"],
        max_residual=d["max_residual"],
        degenerate_fit=d["degenerate_fit"],
    )


def _cert_to_json(cert) -> dict | None:
    if cert is None:
        return None
    return {
        "residual": cert.residual,
        "claimed_rank": cert.claimed_rank,
        "perturbation_rank": cert.perturbation_rank,
        "range_dim": cert.range_dim,
        "valid": cert.valid,
    }


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_coeffs(text: str) -> list[complex]:
    try:
        return [complex(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ContractError(f"cannot parse coefficient list {text!r}") from exc


def cmd_generate(args, argv) -> int:
    out = args.out
    os.makedirs(out, exist_ok=True)
    files: dict[str, str] = {}
    manifest: dict = {
        "schema_version": SCHEMA_VERSION,
        "family": args.family,
        "seed": args.seed,
        "tool_version": __version__,
        "params": {},
    }

    def save(role, name, data, vector=False):
        path = os.path.join(out, name)
        if vector:
            write_vector(path, data)
        else:
            write_matrix(path, data)
        files[role] = name

    if args.family == "fourier-sum":
        H, Z = fourier_sum(args.n, args.seed)
        save("matrix", "H.mtx", H)
        save("start", "Z.mtx", Z)
        manifest["n"] = args.n
    else:
        inst = _build_instance(args)
        save("matrix", "A.mtx", inst.matrix)
        for role in ("x", "y", "u", "v"):
            if role in inst.perturbation_data:
                save(role, f"{role}.mtx", inst.perturbation_data[role], vector=True)
        if "C" in inst.perturbation_data:
            save("perturbation", "C.mtx", inst.perturbation_data["C"])
        manifest["n"] = int(inst.matrix.shape[0])
        manifest["certificate"] = _cert_to_json(inst.certificate)
        manifest["instance_family"] = inst.family
        if inst.conic is not None:
            manifest["conic"] = _conic_to_json(inst.conic)
    if args.family in ("companion", "colleague"):
        manifest["params"]["coeffs"] = [_cplx(z) for z in _parse_coeffs(args.coeffs)]
    if args.family == "curve":
        manifest["params"]["curve"] = args.curve
    if args.family == "solved":
        manifest["params"]["c_kind"] = args.c_kind
        manifest["params"]["alpha"] = _cplx(complex(args.alpha))
    manifest["files"] = files
    _write_json(os.path.join(out, "manifest.json"), manifest)
    print(json.dumps({"out": out, "files": files}, sort_keys=True))
    return EXIT_OK


def _build_instance(args):
    fam = args.family
    if fam == "arrow":
        return arrow_hermitian_plus_rank_one(args.n, args.seed)
    if fam == "companion":
        if not args.coeffs:
            raise ContractError("--coeffs is required for the companion family")
        return companion(_parse_coeffs(args.coeffs))
    if fam == "colleague":
        if not args.coeffs:
            raise ContractError("--coeffs is required for the colleague family")
        return chebyshev_colleague(_parse_coeffs(args.coeffs))
    if fam == "curve":
        curve = args.curve.replace("-", "_")
        return curve_normal_plus_rank_one(args.n, curve, args.seed)
    if fam == "unitary":
        return random_unitary_plus_rank_one(args.n, args.seed)
    if fam == "solved":
        n = args.n
        C = np.zeros((n, n), dtype=np.complex128)
        if args.c_kind == "independent":
            C[0, 1] = 1.0
        else:
            C[0, 0] = complex(args.alpha)
        return solve_commutator_equation(C, seed=args.seed)
    raise ContractError(f"unknown family {fam!r}")


def _starting_block(manifest, in_dir, A):
    """Starting block and reduction phase for the manifest's family.

    Returns ``(Z, phase)``: the block Lanczos run reduces the Hermitian part
    of ``phase * A``, whose basis block-tridiagonalizes A itself.  The phase
    differs from 1 for curve instances violating the leading-form condition
    and for dependent rank-one perturbations.
    """
    fam = manifest["family"]
    files = manifest["files"]

    def vec(role):
        return read_vector(os.path.join(in_dir, files[role]))

    if fam in ("arrow", "colleague"):
        return np.column_stack([vec("x"), vec("y")]), 1.0 + 0j
    if fam in ("companion", "unitary"):
        basis, dim = orthonormal_range(commutator(A))
        if dim == 0:
            raise ContractError("commutator vanishes; nothing to reduce structurally")
        return basis[:, : min(dim, 4)], 1.0 + 0j
    if fam == "curve":
        conic = _conic_from_json(manifest["conic"]) if "conic" in manifest else None
        u, v = vec("u"), vec("v")
        if conic is None:
            return starting_block_curve(A, u, v, None), 1.0 + 0j
        try:
            rotated = rotate_leading_form(conic)
        except LinearVarietyError:
            # Spectrum on a line: the matrix is Hermitian plus rank one.
            return np.column_stack([u, v]), 1.0 + 0j
        phase = np.exp(1j * rotated.theta)
        return starting_block_curve(phase * A, phase * u, v, rotated), phase
    if fam == "fourier-sum":
        return read_matrix(os.path.join(in_dir, files["start"])), 1.0 + 0j
    if fam == "solved":
        u, v = vec("u"), vec("v")
        Z = starting_block_rank_one(A, u, v)
        if Z.shape[1] == 1:
            w = antihermitian_rescaling(u, v)
            return Z, w / abs(w)
        return Z, 1.0 + 0j
    raise ContractError(f"no automatic starting block rule for family {fam!r}")


def cmd_reduce(args, argv) -> int:
    t0 = time.perf_counter()
    in_path = args.input
    if os.path.isdir(in_path):
        manifest_path = os.path.join(in_path, "manifest.json")
        with open(manifest_path, "r", encoding="ascii") as fh:
            manifest = json.load(fh)
        in_dir = in_path
        matrix_path = os.path.join(in_dir, manifest["files"]["matrix"])
    else:
        manifest = None
        in_dir = os.path.dirname(in_path) or "."
        matrix_path = in_path
    A = read_matrix(matrix_path)
    inputs = {matrix_path: _sha256(matrix_path)}
    phase = 1.0 + 0j
    if args.start != "auto":
        Z = read_matrix(args.start)
        inputs[args.start] = _sha256(args.start)
    else:
        if manifest is None:
            raise ContractError(
                "automatic starting blocks need a manifest directory; "
                "pass --start with an explicit block file instead"
            )
        Z, phase = _starting_block(manifest, in_dir, A)
    H = hermitian_part(phase * A)
    red = block_lanczos(H, Z, tol=args.tol)
    U, T = red.basis, red.trid
    n = A.shape[0]
    norm_a = fro(A)
    A_trid = U.conj().T @ A @ U
    residuals = {
        "unitarity": fro(U.conj().T @ U - np.eye(n)) / np.sqrt(n),
        "similarity": fro(U.conj().T @ H @ U - T) / max(norm_a, 1e-300),
        "off_profile": _off_profile(A_trid, red.block_sizes) / max(norm_a, 1e-300),
        "certificate": None,
    }
    os.makedirs(args.out, exist_ok=True)
    write_matrix(os.path.join(args.out, "U.mtx"), U)
    write_matrix(os.path.join(args.out, "T.mtx"), T)
    write_matrix(os.path.join(args.out, "A_trid.mtx"), A_trid)
    files = {"basis": "U.mtx", "trid": "T.mtx", "matrix_trid": "A_trid.mtx"}
    if manifest is not None and "perturbation" in manifest.get("files", {}):
        c_path = os.path.join(in_dir, manifest["files"]["perturbation"])
        C = read_matrix(c_path)
        inputs[c_path] = _sha256(c_path)
        C_trid = U.conj().T @ C @ U
        write_matrix(os.path.join(args.out, "C_trid.mtx"), C_trid)
        files["perturbation_trid"] = "C_trid.mtx"
        k = 2 if manifest["family"] != "solved" else 1
        residuals["certificate"] = certify(A_trid, C_trid, k, tol=args.tol).residual
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": " ".join(argv),
        "tool_version": __version__,
        "inputs": inputs,
        "block_sizes": list(red.block_sizes),
        "breakdown_events": [list(e) for e in red.breakdown_events],
        "restarted": red.restarted,
        "rotation_phase": _cplx(phase),
        "residuals": residuals,
        "files": files,
        "elapsed_ms": (time.perf_counter() - t0) * 1e3,
    }
    _write_json(os.path.join(args.out, "report.json"), report)
    print(json.dumps({k: v for k, v in report.items() if k != "elapsed_ms"},
                     sort_keys=True))
    checked = [v for v in residuals.values() if v is not None]
    return EXIT_OK if all(v <= args.tol for v in checked) else EXIT_VERIFY


def _off_profile(T, sizes):
    idx = np.repeat(np.arange(len(sizes)), sizes)
    mask = np.abs(idx[:, None] - idx[None, :]) <= 1
    return float(np.linalg.norm(T[~mask]))


def cmd_verify(args, argv) -> int:
    A = read_matrix(args.matrix)
    C = read_matrix(args.perturbation)
    cert = certify(A, C, args.k, tol=args.tol)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "residual": cert.residual,
        "perturbation_rank": cert.perturbation_rank,
        "claimed_rank": cert.claimed_rank,
        "range_dim": cert.range_dim,
        "valid": cert.valid,
    }
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK if cert.valid else EXIT_VERIFY


def cmd_spy(args, argv) -> int:
    M = read_matrix(args.matrix)
    thr = args.tol * fro(M)
    stars = np.abs(M) > thr
    if args.format == "ascii":
        lines = ["".join("*" if s else "." for s in row) for row in stars]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="ascii") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        if not args.out:
            raise ContractError("--out is required for pgm output")
        rows, cols = stars.shape
        pixels = np.where(stars, 0, 255).astype(np.uint8)
        with open(args.out, "wb") as fh:
            fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
            fh.write(pixels.tobytes())
    return EXIT_OK


def cmd_qr_track(args, argv) -> int:
    A = read_matrix(args.matrix)
    C = read_matrix(args.perturbation)
    try:
        report = qr_iteration_tracked(A, C, args.steps, tol=args.tol)
    except ContractError as exc:
        raise ContractError(f"{exc}; run `blocktrid reduce` to produce one") from exc
    ok = all(
        all(r <= 2 for r in rec.off_profile_block_ranks)
        and rec.c_residual <= args.tol
        for rec in report.iterations
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": " ".join(argv),
        "tool_version": __version__,
        "inputs": {
            args.matrix: _sha256(args.matrix),
            args.perturbation: _sha256(args.perturbation),
        },
        "initial_block_sizes": list(report.initial_profile.block_sizes),
        "iterations": [
            {
                "step": rec.step,
                "shift": _cplx(rec.shift),
                "off_profile_block_ranks": list(rec.off_profile_block_ranks),
                "c_residual": rec.c_residual,
                "profile_growth": rec.profile_growth,
            }
            for rec in report.iterations
        ],
        "converged_eigenvalues": [_cplx(z) for z in report.converged_eigenvalues],
        "within_rank_bound": ok,
    }
    if args.out:
        _write_json(args.out, payload)
    print(json.dumps({"within_rank_bound": ok,
                      "steps_run": len(report.iterations),
                      "converged": len(report.converged_eigenvalues)},
                     sort_keys=True))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocktrid",
        description="Block tridiagonal reduction and rank tracking for "
        "almost normal and perturbed normal matrices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded matrix family to disk")
    gen.add_argument("--family", required=True, choices=_CLI_FAMILIES)
    gen.add_argument("--n", type=int, default=16)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--coeffs", help="comma-separated coefficients, leading first")
    gen.add_argument(
        "--curve", default="parabola-arc", choices=("circle", "line", "parabola-arc")
    )
    gen.add_argument(
        "--c-kind", default="independent", choices=("independent", "dependent"),
        help="shape of the rank-one perturbation for the solved family",
    )
    gen.add_argument("--alpha", default="2.0", help="scale for the dependent perturbation")
    gen.add_argument("--out", default=".")
    gen.set_defaults(func=cmd_generate)

    red = sub.add_parser("reduce", help="reduce to block tridiagonal form")
    red.add_argument("input", help="manifest directory or matrix file")
    red.add_argument("--start", default="auto", help="starting block file, or 'auto'")
    red.add_argument("--tol", type=float, default=1e-10)
    red.add_argument("--out", default=".")
    red.set_defaults(func=cmd_reduce)

    ver = sub.add_parser("verify", help="check a commutator perturbation")
    ver.add_argument("matrix")
    ver.add_argument("perturbation")
    ver.add_argument("--k", type=int, default=2)
    ver.add_argument("--tol", type=float, default=1e-8)
    ver.set_defaults(func=cmd_verify)

    spy = sub.add_parser("spy", help="render the sparsity pattern")
    spy.add_argument("matrix")
    spy.add_argument("--tol", type=float, default=1e-10)
    spy.add_argument("--format", default="ascii", choices=("ascii", "pgm"))
    spy.add_argument("--out")
    spy.set_defaults(func=cmd_spy)

    track = sub.add_parser("qr-track", help="run shifted QR steps, tracking ranks")
    track.add_argument("matrix", help="block tridiagonal matrix file")
    track.add_argument("perturbation", help="reduced perturbation file")
    track.add_argument("--steps", type=int, default=30)
    track.add_argument("--tol", type=float, default=1e-8)
    track.add_argument("--out")
    track.set_defaults(func=cmd_qr_track)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, list(argv))
    except (OSError, MatrixMarketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyError as exc:
        print(f"error: manifest is missing the {exc} field", file=sys.stderr)
        return EXIT_CONTRACT
    except (
        ContractError,
        DimensionError,
        ConicFitError,
        LinearVarietyError,
        SingularityError,
        GenerationError,
        SolverFailure,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def entry() -> None:
    raise SystemExit(main())
