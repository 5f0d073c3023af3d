"""Download the datasets listed in manifest/datasets.json as headed CSV files.

Checksums are verified when the manifest has one and recorded otherwise.
"""
import argparse
import hashlib
import io
import json
import os
from datetime import datetime, timezone

import pandas as pd
import requests

REQUIRED_FIELDS = {"id", "name", "task", "url", "sep", "header", "target"}
MANIFEST_PATH = os.path.join("manifest", "datasets.json")


def validate_structure(entry):
    missing = REQUIRED_FIELDS - entry.keys()
    if missing:
        return f"[error] missing fields {sorted(missing)} in dataset {entry.get('id', '?')}"
    if not entry["header"] and not entry.get("columns"):
        return f"[error] dataset {entry['id']} has no header and no column names"
    if entry["task"] not in ("reg", "clf"):
        return f"[error] dataset {entry['id']} has unknown task {entry['task']!r}"
    return None


def fetch(entry, out_dir):
    r = requests.get(entry["url"], timeout=60)
    r.raise_for_status()
    digest = hashlib.sha256(r.content).hexdigest()
    expected = entry.get("sha256")
    if expected and expected != digest:
        raise ValueError(f"checksum mismatch for {entry['id']}: {digest} != {expected}")
    frame = pd.read_csv(io.BytesIO(r.content), sep=entry["sep"],
                        header=0 if entry["header"] else None, names=entry.get("columns"))
    if entry["target"] not in frame.columns:
        raise ValueError(f"target {entry['target']!r} not among the columns of {entry['id']}")
    path = os.path.join(out_dir, f"{entry['id']}.csv")
    frame.to_csv(path, index=False)
    return path, digest


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--manifest", default=MANIFEST_PATH)
    parser.add_argument("--out", default="data")
    parser.add_argument("--only", help="comma separated dataset ids")
    args = parser.parse_args(argv)

    with open(args.manifest, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    wanted = set(args.only.split(",")) if args.only else None
    os.makedirs(args.out, exist_ok=True)

    errors, changed = [], False
    for entry in manifest.get("datasets", []):
        if wanted and entry.get("id") not in wanted:
            continue
        err = validate_structure(entry)
        if err:
            errors.append(err)
            continue
        try:
            path, digest = fetch(entry, args.out)
        except (requests.RequestException, ValueError) as e:
            errors.append(f"[error] {entry['id']}: {e}")
            continue
        if not entry.get("sha256"):
            entry["sha256"] = digest
            changed = True
        print(f"[ok] {entry['id']} -> {path}  (target={entry['target']}, task={entry['task']})")

    if changed:
        manifest["updated"] = datetime.now(timezone.utc).date().isoformat()
        with open(args.manifest, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2)
            f.write("\n")
        print(f"[ok] recorded new checksums in {args.manifest}")
    for e in errors:
        print(e)
    return 1 if errors else 0


if __name__ == "__main__":
    raise SystemExit(main())
