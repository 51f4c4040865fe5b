#!/usr/bin/env python3
"""Minimal reference-model runner speaking the JSON-lines load/eval/quit protocol.

Replies go to stdout, one object per line. Anything the model prints goes to stderr.
"""
import json
import sys

_SAFE_BUILTINS = {
    name: getattr(__builtins__, name, None) if not isinstance(__builtins__, dict) else __builtins__.get(name)
    for name in (
        "abs", "all", "any", "bin", "bool", "dict", "divmod", "enumerate", "hex", "int", "isinstance",
        "len", "list", "max", "min", "object", "range", "reversed", "sorted", "str", "sum", "tuple", "zip",
        "ValueError", "ZeroDivisionError", "IndexError", "KeyError", "Exception", "__build_class__",
    )
}


def _stderr_print(*args, **kwargs):
    kwargs["file"] = sys.stderr
    print(*args, **kwargs)


_SAFE_BUILTINS["print"] = _stderr_print


class Session:
    def __init__(self):
        self.model = None
        self.outputs = {}
        self.cycle = 0

    def load(self, frame):
        self.model = None
        self.cycle = 0
        path = frame.get("source_path")
        ports = frame.get("ports")
        if not isinstance(path, str) or not isinstance(ports, list):
            return {"error": {"stage": "protocol", "detail": "load needs source_path and ports"}}
        self.outputs = {}
        for p in ports:
            if not isinstance(p, dict) or "name" not in p or "direction" not in p or "width" not in p:
                return {"error": {"stage": "protocol", "detail": "malformed port entry"}}
            if p["direction"] == "output":
                self.outputs[p["name"]] = int(p["width"])
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
            namespace = {"__builtins__": _SAFE_BUILTINS, "__name__": "refmodel"}
            exec(compile(text, path, "exec"), namespace)
            cls = namespace.get("TopModule")
            if cls is None:
                raise NameError("source defines no class TopModule")
            self.model = cls()
        except BaseException as exc:  # noqa: BLE001 - any load failure is a compile-stage reply
            return {"ok": False, "stage": "compile", "detail": f"{type(exc).__name__}: {exc}"}
        return {"ok": True}

    def eval(self, frame):
        if self.model is None:
            return {"error": {"stage": "protocol", "detail": "no model loaded"}}
        inputs = frame.get("inputs")
        if not isinstance(inputs, dict):
            return {"error": {"stage": "protocol", "detail": "eval needs an inputs object"}}
        cycle = self.cycle
        self.cycle += 1
        try:
            result = self.model.eval(dict(inputs))
        except BaseException as exc:  # noqa: BLE001
            return {"error": {"stage": "runtime", "cycle": cycle, "detail": f"{type(exc).__name__}: {exc}"}}
        if not isinstance(result, dict):
            return {"error": {"stage": "port", "cycle": cycle, "detail": "eval did not return a dict"}}
        missing = sorted(set(self.outputs) - set(result))
        extra = sorted(set(result) - set(self.outputs))
        if missing or extra:
            detail = []
            if missing:
                detail.append("missing outputs: " + ", ".join(missing))
            if extra:
                detail.append("unexpected outputs: " + ", ".join(map(str, extra)))
            return {"error": {"stage": "port", "cycle": cycle, "detail": "; ".join(detail)}}
        out = {}
        for name, width in self.outputs.items():
            value = result[name]
            if isinstance(value, bool):
                value = int(value)
            if not isinstance(value, int):
                return {"error": {"stage": "port", "cycle": cycle,
                                  "detail": f"output {name} is not an integer"}}
            out[name] = value & ((1 << width) - 1)
        return {"outputs": out}


def serve(stdin, stdout):
    session = Session()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            frame = json.loads(line)
            if not isinstance(frame, dict):
                raise ValueError("frame is not an object")
        except ValueError as exc:
            reply = {"error": {"stage": "protocol", "detail": str(exc)}}
        else:
            cmd = frame.get("cmd")
            if cmd == "quit":
                return 0
            if cmd == "load":
                reply = session.load(frame)
            elif cmd == "eval":
                reply = session.eval(frame)
            else:
                reply = {"error": {"stage": "protocol", "detail": f"unknown cmd {cmd!r}"}}
        stdout.write(json.dumps(reply, separators=(",", ":")) + "\n")
        stdout.flush()
    return 0


_SELFTEST_MODEL = """
class TopModule:
    def __init__(self):
        self.q = 0

    def eval(self, inputs: dict) -> dict:
        d = inputs.get("d", 0) & 0x1
        q = self.q
        self.q = d
        return {"q": q ^ 0x2}
"""


def selftest():
    import io
    import os
    import tempfile

    fd, path = tempfile.mkstemp(suffix=".py")
    with os.fdopen(fd, "w") as f:
        f.write(_SELFTEST_MODEL)
    try:
        frames = [{"cmd": "load", "source_path": path,
                   "ports": [{"name": "d", "direction": "input", "width": 1},
                             {"name": "q", "direction": "output", "width": 1}]}]
        frames += [{"cmd": "eval", "inputs": {"d": i & 1}} for i in range(9)]
        out = io.StringIO()
        serve(io.StringIO("".join(json.dumps(f) + "\n" for f in frames)), out)
        replies = [json.loads(x) for x in out.getvalue().splitlines()]
        ok = replies[0] == {"ok": True} and len(replies) == 10
        ok = ok and all(r["outputs"]["q"] == (i - 1) % 2 if i else r["outputs"]["q"] == 0
                        for i, r in enumerate(replies[1:]))
        return 0 if ok else 1
    finally:
        os.unlink(path)


if __name__ == "__main__":
    if "--selftest" in sys.argv[1:]:
        sys.exit(selftest())
    sys.exit(serve(sys.stdin, sys.stdout))
