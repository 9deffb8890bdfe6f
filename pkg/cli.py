#!/usr/bin/env python3
"""命令行入口：采样、ζ、重建、规范化、群作用、闭折线与检验套件

批量数据走 JSON Lines（默认 stdin/stdout），日志写 stderr。
退出码：0 通过，1 检查失败，2 用法错误，3 数值退化。
"""
import sys
import os
import json
import asyncio
import argparse
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from dotenv import load_dotenv

script_dir = Path(os.path.realpath(__file__)).parent
load_dotenv(script_dir / ".env")
sys.path.insert(0, str(script_dir))

from module.codec import decode_sheeted, decode_tuple, read_records, write_records
from module.config_manager import ConfigManager, apply_numerics
from module.coset_space import canonicalize, reconstruct, sheeted, to_coordinates
from module.errors import SpectralError
from module.group_actions import BRANCH_MODES, GroupWord, act_form, act_tuple
from module.haar_measure import sample_tuple
from module.montecarlo import derive_rng
from module.polygon import braid_act, pure_braid_act, sample_closed
from module.suite_manager import suite_manager

logger = logging.getLogger("cli")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load_config(path: Optional[str]) -> ConfigManager:
    config_path = path or os.environ.get("CONFIG_PATH", "config.yaml")
    if not os.path.isabs(config_path):
        config_path = str(script_dir / config_path)
    manager = ConfigManager(config_path)
    apply_numerics(manager.numerics)
    return manager


def setup_logging(config: ConfigManager, debug: bool) -> None:
    level = logging.DEBUG if debug else getattr(logging, str(os.environ.get("LOG_LEVEL") or config.get("logging.level", "WARNING")).upper(), logging.WARNING)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_file = config.get("logging.file")
    if log_file:
        log_path = Path(log_file) if os.path.isabs(log_file) else script_dir / log_file
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path, encoding="utf-8"))
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s", handlers=handlers, force=True)


def resolve_seed(args, config: ConfigManager) -> int:
    """命令行 > 环境变量 PI_SEED > config.yaml；都没有时拒绝运行"""
    for value in (args.seed, os.environ.get("PI_SEED"), config.sampling.get("seed")):
        if value is not None and str(value).strip() != "":
            return int(value)
    raise UsageError(f"{args.command} 是随机命令，需要 --seed、PI_SEED 或 sampling.seed")


def resolve_threads(args, config: ConfigManager) -> int:
    for value in (args.threads, os.environ.get("PI_THREADS"), config.sampling.get("threads")):
        if value is not None and str(value).strip() != "":
            return max(1, int(value))
    return 1


@contextmanager
def open_output(path: Optional[str]):
    if not path or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8") as f:
        yield f


@contextmanager
def open_input(path: Optional[str]):
    if not path or path == "-":
        yield sys.stdin
        return
    with open(path, "r", encoding="utf-8") as f:
        yield f


def _parse_word(text: Optional[str]) -> GroupWord:
    if not text:
        raise UsageError("需要 --word")
    return GroupWord.parse(text)


# ---------- 子命令 ----------

def cmd_sample(args, config: ConfigManager) -> int:
    if args.n < 2:
        raise UsageError(f"n 必须 ≥ 2，得到 {args.n}")
    count = 1 if args.samples is None else args.samples
    if count < 0:
        raise UsageError(f"样本数不能为负: {count}")
    rng = derive_rng(resolve_seed(args, config), 0)

    def records() -> Iterator[Any]:
        for _ in range(count):
            t = sample_tuple(args.n, rng)
            yield canonicalize(t) if args.canonical else t

    with open_output(args.out) as out:
        written = write_records(out, records())
    logger.info(f"已输出 {written} 个元组")
    return EXIT_PASS


def _map_records(args, transform) -> int:
    with open_input(args.input) as stream, open_output(args.out) as out:
        write_records(out, (transform(record, line) for line, record in read_records(stream)))
    return EXIT_PASS


def cmd_zeta(args, config: ConfigManager) -> int:
    return _map_records(args, lambda record, line: sheeted(decode_tuple(record, line)))


def cmd_reconstruct(args, config: ConfigManager) -> int:
    return _map_records(args, lambda record, line: reconstruct(decode_sheeted(record, line)))


def cmd_canonicalize(args, config: ConfigManager) -> int:
    def transform(record, line):
        c = canonicalize(decode_tuple(record, line))
        return to_coordinates(c) if args.coordinates else c

    return _map_records(args, transform)


def cmd_act(args, config: ConfigManager) -> int:
    word = _parse_word(args.word)

    def transform(record, line):
        if "elements" in record:
            return act_tuple(decode_tuple(record, line), word)
        return act_form(decode_sheeted(record, line), word, args.branch)

    return _map_records(args, transform)


def cmd_polygon(args, config: ConfigManager) -> int:
    if not args.theta:
        raise UsageError("需要 --theta")
    theta = [float(x) for x in args.theta.split(",")]
    word = GroupWord.parse(args.word) if args.word else None
    rng = derive_rng(resolve_seed(args, config), 0)
    count = 1 if args.samples is None else args.samples

    def records() -> Iterator[Any]:
        for _ in range(count):
            p = sample_closed(theta, rng)
            if word is None:
                yield p
            else:
                q = braid_act(p, word) if args.any_braid else pure_braid_act(p, word)
                yield {"polygon": p, "image": q, "word": str(word)}

    with open_output(args.out) as out:
        write_records(out, records())
    return EXIT_PASS


def _suite_params(args, config: ConfigManager) -> Dict[str, Any]:
    params: Dict[str, Any] = {
        "seed": resolve_seed(args, config),
        "threads": resolve_threads(args, config),
        "chunk_size": int(config.sampling["chunk_size"]),
    }
    if args.samples is not None:
        params["samples"] = params["trials"] = args.samples
    if args.n is not None:
        params["n"] = args.n
    if args.tol is not None:
        params["tol"] = args.tol
    if args.word:
        params["word"] = args.word
    if args.csv:
        params["csv_path"] = args.csv
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param 需要 key=value，得到 {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def _exit_code(result: Dict[str, Any]) -> int:
    if result.get("success"):
        return EXIT_PASS if result.get("passed") else EXIT_FAIL
    return int(result.get("exit_code", EXIT_FAIL))


def cmd_verify(args, config: ConfigManager) -> int:
    suite_manager.load_all()
    names = args.suites or list(config.verify.get("default_suites") or [])
    if not names:
        raise UsageError("需要指定检验套件名")
    unknown = [s for s in names if suite_manager.find(s) is None]
    if unknown:
        raise UsageError(f"未知检验套件: {unknown}（可用: {', '.join(suite_manager.names())}）")
    params = _suite_params(args, config)
    code = EXIT_PASS
    with open_output(args.out) as out:
        for name in names:
            result = asyncio.run(suite_manager.run(name, **params))
            write_records(out, [{"suite": name, **result}])
            code = max(code, _exit_code(result))
            if not args.quiet:
                status = "通过" if result.get("passed") else "失败"
                print(f"[{name}] {status}", file=sys.stderr)
    return code


def cmd_suites(args, config: ConfigManager) -> int:
    suite_manager.load_all()
    with open_output(args.out) as out:
        write_records(out, suite_manager.list_suites())
    return EXIT_PASS


COMMANDS = {
    "sample": cmd_sample,
    "zeta": cmd_zeta,
    "reconstruct": cmd_reconstruct,
    "canonicalize": cmd_canonicalize,
    "act": cmd_act,
    "polygon": cmd_polygon,
    "verify": cmd_verify,
    "suites": cmd_suites,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="配置文件路径（默认 config.yaml 或 CONFIG_PATH）")
    common.add_argument("--input", help="输入 JSON Lines 文件，默认 stdin")
    common.add_argument("--out", help="输出文件，默认 stdout")
    common.add_argument("--seed", type=int, help="主随机种子")
    common.add_argument("--threads", type=int, help="Monte Carlo 线程数")
    common.add_argument("--debug", action="store_true", help="调试日志")

    parser = argparse.ArgumentParser(description="Π(n) = K\\SU(2)^n/K 数值工具")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="Haar 随机元组")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, help="元组个数（默认 1）")
    p.add_argument("--canonical", action="store_true", help="输出规范代表元")

    sub.add_parser("zeta", parents=[common], help="元组 → (ζ, sheet)")
    sub.add_parser("reconstruct", parents=[common], help="(ζ, sheet) → 元组")

    p = sub.add_parser("canonicalize", parents=[common], help="元组 → 规范代表元")
    p.add_argument("--coordinates", action="store_true", help="输出 (φ, x, y, θ) 坐标")

    p = sub.add_parser("act", parents=[common], help="群作用：元组走矩阵路径，谱形式走闭式路径")
    p.add_argument("--word", required=True, help="例如 's1 s2^-1 inv:2 lmul:2,3 perm:3,2,4'")
    p.add_argument("--branch", choices=BRANCH_MODES, default="theta")

    p = sub.add_parser("polygon", parents=[common], help="抽取闭折线并可作用辫子")
    p.add_argument("--theta", required=True, help="逗号分隔的边长")
    p.add_argument("--samples", type=int)
    p.add_argument("--word")
    p.add_argument("--any-braid", action="store_true", help="允许非纯辫子（边长随之置换）")

    p = sub.add_parser("verify", parents=[common], help="运行检验套件")
    p.add_argument("suites", nargs="*", help="套件名，缺省为 verify.default_suites")
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int, help="样本数 / 试验次数")
    p.add_argument("--tol", type=float)
    p.add_argument("--word")
    p.add_argument("--csv", help="haar-n3 直方图 CSV 输出路径")
    p.add_argument("--param", action="append", help="额外参数 key=value（value 按 JSON 解析）")
    p.add_argument("-q", "--quiet", action="store_true")

    sub.add_parser("suites", parents=[common], help="列出检验套件")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("n", "samples", "tol", "word", "csv", "param", "suites"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        config = load_config(args.config)
    except Exception as e:
        print(f"配置加载失败: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(config, args.debug)
    suites_path = config.verify.get("suites_path", "suites")
    suite_manager.set_suites_path(suites_path if os.path.isabs(suites_path) else str(script_dir / suites_path))
    suite_manager.set_defaults(config.suite_defaults())
    try:
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        print(f"[用法错误] {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpectralError as e:
        print(f"[错误] {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except IndexError as e:
        print(f"[用法错误] {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
