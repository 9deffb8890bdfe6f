"""
JSON 编解码：元组、带叶标记的谱形式、规范坐标、报告

浮点数按 Python 的最短往返表示输出，读回后逐位相等。
批量数据用 JSON Lines（每行一条记录），解析错误带行号。
"""
import json
import logging
from typing import Any, Dict, IO, Iterable, Iterator, Tuple

import numpy as np

from module.coset_space import CanonicalCoordinates, CosetTuple, SheetedForm, SpectralForm
from module.errors import SchemaError
from module.su2_core import UnitQuaternion

logger = logging.getLogger(__name__)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, allow_nan=True)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, CosetTuple):
        return encode_tuple(obj)
    if isinstance(obj, SheetedForm):
        return encode_sheeted(obj)
    if isinstance(obj, SpectralForm):
        return {"n": obj.n, "upper": list(obj.upper)}
    if isinstance(obj, CanonicalCoordinates):
        return encode_coordinates(obj)
    if isinstance(obj, UnitQuaternion):
        return obj.as_list()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def encode_tuple(t: CosetTuple) -> Dict[str, Any]:
    return {"n": t.n, "elements": [g.as_list() for g in t.elements]}


def decode_tuple(data: Dict[str, Any], line: int = 0) -> CosetTuple:
    try:
        elements = data["elements"]
        if "n" in data and int(data["n"]) != len(elements):
            raise SchemaError(f"n={data['n']} 与元素个数 {len(elements)} 不符", line)
        return CosetTuple(tuple(UnitQuaternion.from_vector(e, renormalize=True) for e in elements))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"元组记录无效: {e}", line) from e


def encode_sheeted(sf: SheetedForm) -> Dict[str, Any]:
    return {"n": sf.form.n, "upper": list(sf.form.upper), "sheet": sf.sheet}


def decode_sheeted(data: Dict[str, Any], line: int = 0) -> SheetedForm:
    try:
        if "matrix" in data:
            form = SpectralForm.from_matrix(np.asarray(data["matrix"], dtype=float))
        else:
            form = SpectralForm(int(data["n"]), tuple(float(x) for x in data["upper"]))
        return SheetedForm(form, int(data.get("sheet", 0)))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"谱形式记录无效: {e}", line) from e


def encode_coordinates(c: CanonicalCoordinates) -> Dict[str, Any]:
    return {"phi": c.phi, "x": list(c.x), "y": list(c.y), "theta": list(c.theta)}


def decode_coordinates(data: Dict[str, Any], line: int = 0) -> CanonicalCoordinates:
    try:
        return CanonicalCoordinates(float(data["phi"]), data["x"], data["y"], data["theta"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"坐标记录无效: {e}", line) from e


def read_records(stream: IO[str]) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """逐行读取 JSON Lines，空行跳过，返回 (行号, 记录)"""
    for number, raw in enumerate(stream, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"JSON 解析失败: {e.msg}", number) from e
        if not isinstance(record, dict):
            raise SchemaError("每行必须是一个 JSON 对象", number)
        yield number, record


def write_records(stream: IO[str], records: Iterable[Any]) -> int:
    count = 0
    for record in records:
        stream.write(dumps(record) + "\n")
        count += 1
    stream.flush()
    return count
