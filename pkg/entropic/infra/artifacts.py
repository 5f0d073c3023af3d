import os, aiofiles
from pathlib import Path

from entropic.bench.report import report

REPORT_FILES = {"results.csv": "csv", "table.txt": "text", "curves.csv": "curves"}


async def write_text(path, content: str) -> Path:
    path = Path(path)
    os.makedirs(path.parent, exist_ok=True)
    async with aiofiles.open(path, "w") as f:
        await f.write(content)
    return path


async def write_reports(results, out_dir, include_timing: bool = True) -> dict[str, Path]:
    written = {}
    for name, fmt in REPORT_FILES.items():
        written[name] = await write_text(Path(out_dir) / name, report(results, fmt, include_timing))
    return written
