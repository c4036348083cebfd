import os
import sys
from typing import Optional

import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

# 1. 确保能导入 core 目录
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from core.elliptic import GoldenCertificate, find_point_of_order
from core.errors import ConicError, SearchBudgetError
from core.report import write_report
from core.runner import SCENARIOS, ALIASES, resolve_config, run_scenario
from core.scenario_loader import ScenarioLoader

app = typer.Typer(add_completion=False, help="锥线性系与平面四次曲线束的精确验证")
console = Console()

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _print_results(outcome):
    table = Table(title=f"scenario: {outcome.name}")
    table.add_column("claim")
    table.add_column("anchor")
    table.add_column("status")
    for r in outcome.results:
        color = "green" if r.passed else "red"
        table.add_row(r.name, r.anchor, f"[{color}]{r.status}[/{color}]")
    console.print(table)
    console.print(f"sha256: {outcome.report.checksum}")


@app.command()
def run(
        scenario: str = typer.Argument(..., help="场景名，见 list"),
        field: Optional[str] = typer.Option(None, "--field", help="QQ / 素数 / GF(p^k)"),
        prime: Optional[int] = typer.Option(None, "--prime", help="等价于 --field <p>"),
        curve: Optional[str] = typer.Option(None, "--curve", help="内置曲线名"),
        seed: Optional[int] = typer.Option(None, "--seed"),
        samples: Optional[int] = typer.Option(None, "--samples", help="一般点样本数"),
        extension_cap: Optional[int] = typer.Option(None, "--extension-cap"),
        truncation: Optional[int] = typer.Option(None, "--truncation"),
        scan_region: Optional[str] = typer.Option(None, "--scan-region", help="'x:y:z:w;...' 或 all"),
        budget: Optional[int] = typer.Option(None, "--budget", help="扫描 / 搜索预算，0 为不限"),
        certify_smooth: Optional[bool] = typer.Option(None, "--certify-smooth/--no-certify-smooth"),
        config_path: Optional[str] = typer.Option(None, "--config", help="场景配置文件，覆盖命令行标志"),
        output: Optional[str] = typer.Option(None, "--output", help="报告路径"),
):
    """运行一个场景并写出报告"""
    if field is not None and prime is not None:
        console.print("[red]--field 与 --prime 只能给一个[/red]")
        raise typer.Exit(EXIT_USAGE)
    flags = {
        "field": str(prime) if prime is not None else field,
        "curve": curve, "seed": seed, "samples": samples, "extension_cap": extension_cap,
        "truncation": truncation, "scan_region": scan_region, "budget": budget,
        "certify_smooth": certify_smooth, "output": output,
    }
    try:
        cfg = resolve_config(scenario, flags, config_path)
        outcome = run_scenario(scenario, cfg)
    except SearchBudgetError as e:
        console.print(f"[yellow]⏸️ 预算耗尽: {e}[/yellow]")
        console.print(f"resume token: {e.resume_token}")
        raise typer.Exit(EXIT_BUDGET)
    except ConicError as e:
        console.print(f"[red]❌ {type(e).__name__}: {e}[/red]")
        raise typer.Exit(e.exit_code)

    _print_results(outcome)
    path = cfg.output or os.path.join(config.REPORTS_DIR, f"{outcome.name}.txt")
    write_report(outcome.report, path)
    raise typer.Exit(outcome.exit_code)


@app.command("list")
def list_scenarios():
    """列出所有场景"""
    loader = ScenarioLoader()
    files = set(loader.available())
    table = Table(title="scenarios")
    table.add_column("name")
    table.add_column("description")
    for name in SCENARIOS:
        cfg = loader.load(name) if name in files else None
        table.add_row(name, cfg.description if cfg else "")
    for alias, target in sorted(ALIASES.items()):
        table.add_row(alias, f"alias of {target}")
    console.print(table)


@app.command()
def golden(
        seed: int = typer.Option(config.DEFAULT_SEED, "--seed"),
        budget: int = typer.Option(0, "--budget", help="最多检查的曲线数，0 为不限"),
        force: bool = typer.Option(False, "--force", help="覆盖已有的金证书"),
):
    """搜索 16 阶点并写入金证书"""
    if os.path.exists(config.GOLDEN_PATH) and not force:
        cert = GoldenCertificate.load(config.GOLDEN_PATH)
        console.print(f"已有金证书 (verify = {cert.verify()}):\n{cert.to_text()}")
        raise typer.Exit(EXIT_PASS if cert.verify() else EXIT_FAIL)
    try:
        w = find_point_of_order(seed=seed, budget=budget)
    except SearchBudgetError as e:
        console.print(f"[yellow]⏸️ 预算耗尽: {e}，resume token: {e.resume_token}[/yellow]")
        raise typer.Exit(EXIT_BUDGET)
    cert = GoldenCertificate.from_witness(w)
    cert.save(config.GOLDEN_PATH)
    logger.info(f"💾 [Main] 金证书已写入 {config.GOLDEN_PATH}")
    console.print(cert.to_text())
    raise typer.Exit(EXIT_PASS if cert.verify() else EXIT_FAIL)


if __name__ == "__main__":
    app()
