import os
import re
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional

from loguru import logger

import config
from core.errors import ScenarioError

# front matter 键 (小写、去下划线) -> ScenarioConfig 字段
_KEYS = {
    "name": "name",
    "description": "description",
    "curve": "curve",
    "field": "field",
    "seed": "seed",
    "samples": "samples",
    "extensioncap": "extension_cap",
    "truncation": "truncation",
    "scanregion": "scan_region",
    "budget": "budget",
    "certifysmooth": "certify_smooth",
    "output": "output",
}
_INT_FIELDS = {"seed", "samples", "extension_cap", "truncation", "budget"}


@dataclass
class ScenarioConfig:
    """场景配置：命令行标志与场景文件合并后的结果"""
    name: str
    description: str = ""
    curve: Optional[str] = None
    curve_spec: Dict[str, Any] = dc_field(default_factory=dict)
    field: Optional[str] = None
    seed: int = config.DEFAULT_SEED
    samples: int = config.GENERIC_TRIALS
    extension_cap: int = config.EXTENSION_CAP
    truncation: Optional[int] = None
    scan_region: Optional[str] = None
    budget: int = config.SCAN_BUDGET
    certify_smooth: bool = False
    output: Optional[str] = None
    plan: List[str] = dc_field(default_factory=list)
    source: Optional[str] = None

    def merged(self, overrides: Dict[str, Any]) -> "ScenarioConfig":
        """overrides 中非 None 的值覆盖当前字段"""
        values = dict(self.__dict__)
        for key, value in overrides.items():
            if key not in values:
                raise ScenarioError(f"未知配置项: {key}")
            if value is not None:
                values[key] = value
        return ScenarioConfig(**values)

    def curve_source(self):
        """build_curve 可以接受的曲线描述"""
        if self.curve_spec:
            return dict(self.curve_spec)
        return self.curve

    def inputs(self) -> Dict[str, Any]:
        """写进报告的输入 (稳定键序)"""
        out = {"curve": self.curve or ("custom" if self.curve_spec else None), "field": self.field,
               "seed": self.seed, "samples": self.samples, "extension_cap": self.extension_cap,
               "truncation": self.truncation, "scan_region": self.scan_region, "budget": self.budget,
               "certify_smooth": self.certify_smooth}
        if self.curve_spec:
            out["curve_spec"] = ";".join(f"{k}={self.curve_spec[k]}" for k in sorted(self.curve_spec))
        return {k: v for k, v in sorted(out.items()) if v is not None}


class ScenarioLoader:
    """
    场景 Markdown 加载器
    负责：读取 Markdown -> 解析 # Key: Value 头部 -> 解析 ## Curve / ## Plan 章节
    """

    def __init__(self, scenarios_dir: str = None):
        self.scenarios_dir = scenarios_dir or config.SCENARIOS_DIR

    def path_for(self, name: str) -> str:
        if os.path.isabs(name) or name.endswith(".md"):
            return name if os.path.isabs(name) else os.path.join(self.scenarios_dir, name)
        return os.path.join(self.scenarios_dir, f"{name}.md")

    def available(self) -> List[str]:
        if not os.path.isdir(self.scenarios_dir):
            return []
        return sorted(f[:-3] for f in os.listdir(self.scenarios_dir) if f.endswith(".md"))

    def load(self, name: str) -> Optional[ScenarioConfig]:
        """场景文件不存在时返回 None (由调用方用命令行标志构造配置)"""
        values = self.load_values(name)
        if values is None:
            return None
        values.setdefault("name", name)
        return ScenarioConfig(**values)

    def load_values(self, name: str) -> Optional[Dict[str, Any]]:
        """只返回文件里显式给出的配置项，用于按优先级合并"""
        path = self.path_for(name)
        if not os.path.exists(path):
            logger.debug(f"[Scenario] 没有场景文件 {path}")
            return None
        with open(path, "r", encoding="utf-8") as f:
            content = f.read()
        values = self.values(content, source=path)
        values["source"] = path
        return values

    def parse(self, content: str, default_name: str = "", source: Optional[str] = None) -> ScenarioConfig:
        values = self.values(content, source)
        values.setdefault("name", default_name)
        return ScenarioConfig(source=source, **values)

    def values(self, content: str, source: Optional[str] = None) -> Dict[str, Any]:
        meta = self._parse_front_matter(content)
        values: Dict[str, Any] = {}
        for key, value in meta.items():
            if key not in _KEYS:
                raise ScenarioError(f"场景文件中的未知键: {key}", source=source)
            values[_KEYS[key]] = value
        for key in _INT_FIELDS & set(values):
            try:
                values[key] = int(values[key])
            except ValueError:
                raise ScenarioError(f"{key} 需要整数，收到 {values[key]!r}", source=source)
        if "certify_smooth" in values:
            values["certify_smooth"] = str(values["certify_smooth"]).lower() in ("1", "true", "yes", "on")

        curve_text = self._extract_section(content, "Curve")
        if curve_text:
            values["curve_spec"] = self._parse_curve_section(curve_text, source)
        plan_text = self._extract_section(content, "Plan")
        if plan_text:
            values["plan"] = [line.strip().lstrip("-").strip() for line in plan_text.splitlines()
                              if line.strip() and not line.strip().startswith("<!--")]
        return values

    @staticmethod
    def _parse_curve_section(text: str, source: Optional[str]) -> Dict[str, Any]:
        """variant / forms / quadrics / a / b；forms 与 quadrics 以逗号分隔"""
        spec: Dict[str, Any] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if ":" not in line:
                raise ScenarioError(f"## Curve 中无法解析的行: {line!r}", source=source)
            key, value = line.split(":", 1)
            key, value = key.strip().lower(), value.strip()
            if key in ("forms", "quadrics"):
                spec[key] = [v.strip() for v in value.split(",") if v.strip()]
            else:
                spec[key] = value
        if "variant" not in spec:
            raise ScenarioError("## Curve 缺少 variant", source=source)
        return spec

    @staticmethod
    def _parse_front_matter(content: str) -> Dict[str, str]:
        """解析 # Key: Value"""
        meta = {}
        for line in content.split('\n'):
            line = line.strip()
            if not line:
                continue
            if not line.startswith('#') or line.startswith('##'):
                break
            content_line = line[1:].strip()
            if ':' in content_line:
                key, value = content_line.split(':', 1)
                meta[key.strip().lower().replace('_', '')] = value.strip()
        return meta

    @staticmethod
    def _extract_section(content: str, section_name: str) -> Optional[str]:
        """提取 ## Section 下的内容"""
        pattern = rf'## {section_name}\s*\n(.*?)(?=\n## |\Z)'
        match = re.search(pattern, content, re.DOTALL)
        return match.group(1).strip() if match else None
