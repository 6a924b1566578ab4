"""Command-line client for the workbench service.

Every subcommand talks HTTP to the service API. By default requests run
against an in-process application instance, so no server is needed; pass
`--server URL` to target a running one (`mcgkit serve`). Grammars are given
as a `.mcg` file path or as `builtin:<name>`.

Exit codes: 0 on success (and on "recognized"), 1 when a string is not
recognized or a grammar fails validation, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


def _request(server: str | None, method: str, path: str, payload: dict | None = None) -> dict:
    async def go() -> httpx.Response:
        if server is None:
            from .service import create_app

            transport = httpx.ASGITransport(app=create_app())
            client = httpx.AsyncClient(transport=transport, base_url="http://mcgkit.local")
        else:
            client = httpx.AsyncClient(base_url=server, timeout=None)
        async with client:
            return await client.request(method, path, json=payload)

    response = asyncio.run(go())
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CommandError(f"{detail}")
    return response.json()


class CommandError(Exception):
    pass


def _grammar_source(source: str) -> dict:
    if source.startswith("builtin:"):
        return {"builtin": source.removeprefix("builtin:")}
    path = Path(source)
    try:
        return {"text": path.read_text(encoding="utf-8")}
    except OSError as exc:
        raise CommandError(f"cannot read grammar file {source!r}: {exc}") from None


def _write(path: str, content: str) -> None:
    Path(path).write_text(content, encoding="utf-8")


def _write_dots(directory: str, dots: dict[str, str]) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for filename, content in sorted(dots.items()):
        (out / filename).write_text(content, encoding="utf-8")


def cmd_validate(args) -> int:
    data = _request(
        args.server, "POST", "/validate", {"grammar": _grammar_source(args.grammar)}
    )
    flags = []
    if data["substitution_only"]:
        flags.append("substitution-only")
    if data["lexicalized"]:
        flags.append("lexicalized")
    suffix = f" ({', '.join(flags)})" if flags else ""
    if data["violations"]:
        print(f"{data['grammar_name']}: {len(data['violations'])} violation(s){suffix}")
        for violation in data["violations"]:
            print(f"  {violation}")
        return EXIT_NEGATIVE
    print(f"{data['grammar_name']}: ok{suffix}")
    return EXIT_OK


def cmd_recognize(args) -> int:
    data = _request(
        args.server,
        "POST",
        "/recognize",
        {"grammar": _grammar_source(args.grammar), "string": args.string},
    )
    if not data["recognized"]:
        print("not recognized")
        return EXIT_NEGATIVE
    print("recognized")
    if args.verbose and data["witness"]:
        print(data["witness"]["text"])
    if args.dot and data["witness"]:
        _write(args.dot, data["witness"]["dot"])
    return EXIT_OK


def cmd_derive(args) -> int:
    data = _request(
        args.server,
        "POST",
        "/derive",
        {"grammar": _grammar_source(args.grammar), "string": args.string},
    )
    print(f"{data['count']} derivation(s), exhausted={str(data['exhausted']).lower()}")
    for i, derivation in enumerate(data["derivations"]):
        print(f"--- derivation {i}")
        print(derivation["text"])
    if args.dot_dir:
        dots = {
            f"derivation_{i}.dot": d["dot"] for i, d in enumerate(data["derivations"])
        }
        _write_dots(args.dot_dir, dots)
    return EXIT_OK


def cmd_generate(args) -> int:
    data = _request(
        args.server,
        "POST",
        "/generate",
        {"grammar": _grammar_source(args.grammar), "max_len": args.max_len},
    )
    for tokens in data["strings"]:
        print(" ".join(tokens))
    return EXIT_OK


def cmd_scramble_matrix(args) -> int:
    payload = {
        "grammar": _grammar_source(args.grammar),
        "depth": args.depth,
        "allow_partial": args.allow_partial,
        "include_witness_dots": bool(args.dot_dir),
    }
    data = _request(args.server, "POST", "/scramble-matrix", payload)
    if args.csv:
        _write(args.csv, data["csv"])
    else:
        print(data["text"], end="")
    if args.dot_dir:
        _write_dots(args.dot_dir, data["witness_dots"])
    return EXIT_OK


def cmd_center_embed(args) -> int:
    data = _request(
        args.server,
        "POST",
        "/center-embed",
        {"grammar": _grammar_source(args.grammar), "max_depth": args.max_depth},
    )
    if args.csv:
        _write(args.csv, data["csv"])
    else:
        print(data["text"], end="")
    return EXIT_OK


def cmd_grammars(args) -> int:
    if args.name:
        data = _request(args.server, "GET", f"/grammars/{args.name}")
        print(data["text"], end="")
    else:
        data = _request(args.server, "GET", "/grammars")
        for name in data["builtins"]:
            print(name)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcgkit", description="TAG / MC-TAG workbench client"
    )
    parser.add_argument("--server", help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a grammar file")
    p.add_argument("--grammar", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("recognize", help="decide membership of a string")
    p.add_argument("--grammar", required=True)
    p.add_argument("--string", required=True, help="whitespace-separated tokens")
    p.add_argument("--verbose", action="store_true", help="print the witness derivation")
    p.add_argument("--dot", help="write the witness derivation as DOT to this file")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("derive", help="enumerate all derivations of a string")
    p.add_argument("--grammar", required=True)
    p.add_argument("--string", required=True)
    p.add_argument("--dot-dir", help="write one DOT file per derivation")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("generate", help="generate the language up to a length bound")
    p.add_argument("--grammar", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("scramble-matrix", help="per-permutation derivability at a depth")
    p.add_argument("--grammar", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--csv", help="write the matrix as CSV to this path")
    p.add_argument("--dot-dir", help="write one DOT file per co-occurrence witness")
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_scramble_matrix)

    p = sub.add_parser("center-embed", help="recognition scan over center embedding depths")
    p.add_argument("--grammar", required=True)
    p.add_argument("--max-depth", type=int, required=True)
    p.add_argument("--csv", help="write the report as CSV to this path")
    p.set_defaults(func=cmd_center_embed)

    p = sub.add_parser("grammars", help="list shipped grammars or print one")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_grammars)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
