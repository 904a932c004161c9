"""Search-space configurations: bounds, domains, invariant flags.

Files are INI-style with one `[section]` per named configuration, `#` line
comments and case-sensitive keys. A section starts from the model's default
configuration and overlays the keys it sets, so partial files are legal.
`*` as an upper bound stands for the resolvable default (`default_upper`).
"""

from __future__ import annotations

import copy
import difflib
from dataclasses import dataclass, field

from .diagnostics import ConfigError, InputError, ParseError, SourceLocation
from .model import Model
from .ocl_types import BOOLEAN, INTEGER, REAL, STRING


class _DefaultUpper:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"


DEFAULT_UPPER = _DefaultUpper()

FLAG_VALUES = ("active", "inactive", "negated")


@dataclass
class Configuration:
    integer_min: int = -10
    integer_max: int = 10
    string_count: int = 10
    string_values: list = field(default_factory=list)  # explicit strings, optional
    real_values: list = field(default_factory=list)
    class_bounds: dict = field(default_factory=dict)  # class -> (min, max|DEFAULT_UPPER)
    association_bounds: dict = field(default_factory=dict)
    attribute_domains: dict = field(default_factory=dict)  # (class, attr) -> ("set", tuple) | ("range", lo, hi)
    invariant_flags: dict = field(default_factory=dict)  # qualified name -> flag
    bitwidth: int = 8
    required_links: list = field(default_factory=list)  # (assoc, obj1, obj2)
    default_upper: int = 10

    def clone(self) -> "Configuration":
        return copy.deepcopy(self)

    def resolve_upper(self, bound):
        lo, hi = bound
        return (lo, self.default_upper if hi is DEFAULT_UPPER else hi)

    def strings(self) -> list:
        if self.string_values:
            return list(self.string_values)
        return [f"string{i}" for i in range(1, self.string_count + 1)]

    def flag_of(self, qualified_name: str) -> str:
        return self.invariant_flags.get(qualified_name, "active")


@dataclass
class ConfigFile:
    path: str = ""
    configs: dict = field(default_factory=dict)  # insertion-ordered name -> Configuration


def default_config(model: Model) -> Configuration:
    cfg = Configuration()
    for c in model.classes:
        if not c.is_abstract:
            cfg.class_bounds[c.name] = (0, DEFAULT_UPPER)
    for a in model.associations:
        cfg.association_bounds[a.name] = (0, DEFAULT_UPPER)
    for inv in model.invariants:
        cfg.invariant_flags[inv.qualified_name] = "active"
    return cfg


# -- validation ---------------------------------------------------------------

def validate(config: Configuration, model: Model) -> list[ConfigError]:
    errors = []

    def err(key, message):
        errors.append(ConfigError(key, message))

    if config.integer_min > config.integer_max:
        err("Integer_min", f"Integer_min ({config.integer_min}) exceeds Integer_max ({config.integer_max})")
    if config.string_count < 0:
        err("String_count", "String_count must be nonnegative")
    if config.bitwidth < 1:
        err("bitwidth", "bitwidth must be at least 1")
    if config.default_upper < 0:
        err("default_upper", "default_upper must be nonnegative")

    for cls, bound in config.class_bounds.items():
        c = model.get_class(cls)
        if c is None:
            err(f"{cls}_min", f"unknown class '{cls}'")
            continue
        if c.is_abstract:
            err(f"{cls}_min", f"class '{cls}' is abstract and cannot be setup")
        lo, hi = config.resolve_upper(bound)
        if lo < 0:
            err(f"{cls}_min", f"minimum for '{cls}' must be nonnegative")
        if lo > hi:
            err(f"{cls}_min", f"minimum {lo} for '{cls}' exceeds maximum {hi}")

    for assoc, bound in config.association_bounds.items():
        if model.get_association(assoc) is None:
            err(f"{assoc}_min", f"unknown association '{assoc}'")
            continue
        lo, hi = config.resolve_upper(bound)
        if lo < 0:
            err(f"{assoc}_min", f"minimum for '{assoc}' must be nonnegative")
        if lo > hi:
            err(f"{assoc}_min", f"minimum {lo} for '{assoc}' exceeds maximum {hi}")

    for (cls, attr), domain in config.attribute_domains.items():
        key = f"{cls}_{attr}"
        c = model.get_class(cls)
        a = model.find_attribute(cls, attr) if c else None
        if a is None:
            err(key, f"unknown attribute '{cls}.{attr}'")
            continue
        if domain[0] == "range":
            if a.type != INTEGER:
                err(key, f"subrange domains apply to Integer attributes, '{cls}.{attr}' is {a.type}")
            elif domain[1] is not None and domain[2] is not None and domain[1] > domain[2]:
                err(f"{key}_min", f"minimum {domain[1]} for '{cls}.{attr}' exceeds maximum {domain[2]}")
        else:
            for v in domain[1]:
                if not _matches_basic(v, a.type):
                    err(key, f"value {v!r} does not match type {a.type} of '{cls}.{attr}'")

    for qname, flag in config.invariant_flags.items():
        if flag not in FLAG_VALUES:
            err(f"inv::{qname}", f"flag must be one of {', '.join(FLAG_VALUES)}, got '{flag}'")
        if model.get_invariant(qname) is None:
            err(f"inv::{qname}", f"unknown invariant '{qname}'")

    for assoc, o1, o2 in config.required_links:
        if model.get_association(assoc) is None:
            err(f"link::{assoc}", f"unknown association '{assoc}'")

    return errors


def _matches_basic(v, t):
    if t == INTEGER:
        return isinstance(v, int) and not isinstance(v, bool)
    if t == REAL:
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    if t == STRING:
        return isinstance(v, str)
    if t == BOOLEAN:
        return isinstance(v, bool)
    return False


# -- management operations ------------------------------------------------------

def _require(file: ConfigFile, name: str):
    if name not in file.configs:
        raise InputError(ConfigError(name, f"unknown configuration '{name}'"))


def clone_config(file: ConfigFile, name: str, new_name: str = None) -> ConfigFile:
    _require(file, name)
    if new_name is None:
        new_name = f"{name} (copy)"
        i = 2
        while new_name in file.configs:
            new_name = f"{name} (copy {i})"
            i += 1
    elif new_name in file.configs:
        raise InputError(ConfigError(new_name, f"configuration '{new_name}' already exists"))
    configs = {k: v.clone() for k, v in file.configs.items()}
    configs[new_name] = file.configs[name].clone()
    return ConfigFile(file.path, configs)


def rename_config(file: ConfigFile, name: str, new_name: str) -> ConfigFile:
    _require(file, name)
    if new_name != name and new_name in file.configs:
        raise InputError(ConfigError(new_name, f"configuration '{new_name}' already exists"))
    if not new_name:
        raise InputError(ConfigError(new_name, "configuration names must be nonempty"))
    configs = {}
    for k, v in file.configs.items():
        configs[new_name if k == name else k] = v.clone()
    return ConfigFile(file.path, configs)


def delete_config(file: ConfigFile, name: str) -> ConfigFile:
    _require(file, name)
    configs = {k: v.clone() for k, v in file.configs.items() if k != name}
    return ConfigFile(file.path, configs)


# -- serialization ----------------------------------------------------------------

def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return f"'{v}'"
    return str(v)


def serialize_config_file(file: ConfigFile) -> str:
    out = []
    for name, cfg in file.configs.items():
        out.append(f"[{name}]")
        out.append(f"Integer_min = {cfg.integer_min}")
        out.append(f"Integer_max = {cfg.integer_max}")
        out.append(f"String_count = {cfg.string_count}")
        if cfg.string_values:
            out.append("String_values = {" + ", ".join(_format_value(s) for s in cfg.string_values) + "}")
        if cfg.real_values:
            out.append("Real_values = {" + ", ".join(_format_value(r) for r in cfg.real_values) + "}")
        out.append(f"bitwidth = {cfg.bitwidth}")
        out.append(f"default_upper = {cfg.default_upper}")
        for cls, (lo, hi) in cfg.class_bounds.items():
            out.append(f"{cls}_min = {lo}")
            out.append(f"{cls}_max = {'*' if hi is DEFAULT_UPPER else hi}")
        for assoc, (lo, hi) in cfg.association_bounds.items():
            out.append(f"{assoc}_min = {lo}")
            out.append(f"{assoc}_max = {'*' if hi is DEFAULT_UPPER else hi}")
        for (cls, attr), domain in cfg.attribute_domains.items():
            if domain[0] == "range":
                if domain[1] is not None:
                    out.append(f"{cls}_{attr}_min = {domain[1]}")
                if domain[2] is not None:
                    out.append(f"{cls}_{attr}_max = {domain[2]}")
            else:
                out.append(f"{cls}_{attr} = {{" + ", ".join(_format_value(v) for v in domain[1]) + "}")
        for qname, flag in cfg.invariant_flags.items():
            out.append(f"inv::{qname} = {flag}")
        for assoc, o1, o2 in cfg.required_links:
            out.append(f"link::{assoc} = ({o1}, {o2})")
        out.append("")
    return "\n".join(out)


# -- parsing ------------------------------------------------------------------------

def _valid_keys(model: Model) -> list:
    keys = ["Integer_min", "Integer_max", "String_count", "String_values",
            "Real_values", "bitwidth", "default_upper"]
    for c in model.classes:
        if not c.is_abstract:
            keys += [f"{c.name}_min", f"{c.name}_max"]
        for a in model.all_attributes(c.name):
            keys += [f"{c.name}_{a.name}", f"{c.name}_{a.name}_min", f"{c.name}_{a.name}_max"]
    for a in model.associations:
        keys += [f"{a.name}_min", f"{a.name}_max", f"link::{a.name}"]
    for inv in model.invariants:
        keys.append(f"inv::{inv.qualified_name}")
    return keys


def parse_config_file(text: str, model: Model, filename: str = "<config>") -> ConfigFile:
    """Parse all named configurations; raises InputError on any bad entry."""
    configs = {}
    current = None
    errors = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        loc = SourceLocation(filename, lineno, 1)
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                errors.append(ParseError("Syntax", "unterminated section header", loc))
                continue
            name = line[1:-1].strip()
            if not name:
                errors.append(ConfigError("[section]", "configuration names must be nonempty", loc))
                continue
            if name in configs:
                errors.append(ConfigError(name, f"duplicate configuration name '{name}'", loc))
                continue
            current = default_config(model)
            configs[name] = current
            continue
        if "=" not in line:
            errors.append(ParseError("Syntax", f"expected 'key = value', found '{line}'", loc))
            continue
        if current is None:
            errors.append(ConfigError(line.split("=")[0].strip(), "key outside of a [section]", loc))
            continue
        key, _, value = line.partition("=")
        e = _apply_key(current, key.strip(), value.strip(), model, loc)
        if e is not None:
            errors.append(e)

    if errors:
        raise InputError(errors)
    return ConfigFile(filename, configs)


def _parse_int(value):
    try:
        return int(value)
    except ValueError:
        return None


def _parse_scalar(token):
    token = token.strip()
    if token.startswith("'") and token.endswith("'") and len(token) >= 2:
        return token[1:-1]
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return None


def _parse_value_set(value):
    value = value.strip()
    if not (value.startswith("{") and value.endswith("}")):
        return None
    inner = value[1:-1].strip()
    if not inner:
        return []
    out = []
    for part in inner.split(","):
        v = _parse_scalar(part)
        if v is None:
            return None
        out.append(v)
    return out


def _apply_key(cfg: Configuration, key: str, value: str, model: Model, loc):
    def bad(msg):
        return ConfigError(key, msg, loc)

    if key in ("Integer_min", "Integer_max", "String_count", "bitwidth", "default_upper"):
        n = _parse_int(value)
        if n is None:
            return bad(f"expected an integer, got '{value}'")
        setattr(cfg, {"Integer_min": "integer_min", "Integer_max": "integer_max",
                      "String_count": "string_count", "bitwidth": "bitwidth",
                      "default_upper": "default_upper"}[key], n)
        return None
    if key == "String_values":
        vs = _parse_value_set(value)
        if vs is None or not all(isinstance(v, str) for v in vs):
            return bad(f"expected a set of quoted strings like {{'a', 'b'}}, got '{value}'")
        cfg.string_values = vs
        return None
    if key == "Real_values":
        vs = _parse_value_set(value)
        if vs is None or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vs):
            return bad(f"expected a set of numbers like {{0.5, 1.0}}, got '{value}'")
        cfg.real_values = [float(v) for v in vs]
        return None
    if key.startswith("inv::"):
        qname = key[len("inv::"):]
        if model.get_invariant(qname) is None:
            return bad(f"unknown invariant '{qname}'")
        if value not in FLAG_VALUES:
            return bad(f"expected one of {', '.join(FLAG_VALUES)}, got '{value}'")
        cfg.invariant_flags[qname] = value
        return None
    if key.startswith("link::"):
        assoc = key[len("link::"):]
        if model.get_association(assoc) is None:
            return bad(f"unknown association '{assoc}'")
        v = value.strip()
        if not (v.startswith("(") and v.endswith(")")):
            return bad(f"expected a pair like (obj1, obj2), got '{value}'")
        parts = [p.strip() for p in v[1:-1].split(",")]
        if len(parts) != 2 or not all(parts):
            return bad(f"expected a pair like (obj1, obj2), got '{value}'")
        cfg.required_links.append((assoc, parts[0], parts[1]))
        return None

    for suffix, idx in (("_min", 0), ("_max", 1)):
        if key.endswith(suffix):
            stem = key[:-len(suffix)]
            if idx == 1 and value.strip() == "*":
                bound = DEFAULT_UPPER
            else:
                bound = _parse_int(value)
                if bound is None:
                    return bad(f"expected an integer{' or *' if idx == 1 else ''}, got '{value}'")
            c = model.get_class(stem)
            if c is not None:
                if c.is_abstract:
                    return bad(f"class '{stem}' is abstract and cannot be setup")
                cur = cfg.class_bounds.get(stem, (0, DEFAULT_UPPER))
                cfg.class_bounds[stem] = (bound, cur[1]) if idx == 0 else (cur[0], bound)
                return None
            if model.get_association(stem) is not None:
                cur = cfg.association_bounds.get(stem, (0, DEFAULT_UPPER))
                cfg.association_bounds[stem] = (bound, cur[1]) if idx == 0 else (cur[0], bound)
                return None
            target = _resolve_attr(stem, model)
            if target is not None:
                if bound is DEFAULT_UPPER:
                    return bad("attribute subranges require explicit integer endpoints")
                cur = cfg.attribute_domains.get(target)
                # missing endpoints stay None and fall back to the integer domain
                lo, hi = (cur[1], cur[2]) if cur and cur[0] == "range" else (None, None)
                cfg.attribute_domains[target] = ("range", bound, hi) if idx == 0 else ("range", lo, bound)
                return None
            return _unknown_key(key, model, loc)

    target = _resolve_attr(key, model)
    if target is not None:
        vs = _parse_value_set(value)
        if vs is None:
            return bad(f"expected a value set like {{v1, v2}}, got '{value}'")
        cfg.attribute_domains[target] = ("set", tuple(vs))
        return None

    return _unknown_key(key, model, loc)


def _resolve_attr(stem: str, model: Model):
    """Longest `<Class>_<attr>` split matching a declared attribute, or None."""
    best = None
    for c in model.classes:
        prefix = c.name + "_"
        if stem.startswith(prefix):
            attr = stem[len(prefix):]
            if model.find_attribute(c.name, attr) is not None:
                if best is None or len(c.name) > len(best[0]):
                    best = (c.name, attr)
    return best


def _unknown_key(key: str, model: Model, loc):
    candidates = _valid_keys(model)
    close = difflib.get_close_matches(key, candidates, n=1, cutoff=0.0)
    hint = f"; nearest valid key is '{close[0]}'" if close else ""
    return ConfigError(key, f"unknown key '{key}'{hint}", loc)
