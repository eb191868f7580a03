"""
Report files: JSON with a fixed key order, and a CSV summary table
"""
import hashlib
import json
import logging
import os
from typing import Dict, List

import pandas as pd

from semigroup import FLAG_ORDER
from verify import CampaignResult, TheoremReport

logger = logging.getLogger(__name__)


def render_json(data: Dict) -> str:
    """Keys stay in insertion order; identical input renders byte-identically"""
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str) -> Dict:
    return json.loads(text)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _gens(gens) -> str:
    return ",".join(str(g) for g in gens)


def summary_rows(reports: List[TheoremReport]) -> List[Dict]:
    rows = []
    for rep in reports:
        row = {"left": _gens(rep.pair[0]), "right": _gens(rep.pair[1])}
        cls = rep.classification or {}
        row.update({"e": cls.get("e"), "v": cls.get("v"), "r": cls.get("r")})
        direct = cls.get("direct") or {}
        for name in FLAG_ORDER:
            row[name] = direct.get(name)
        row["agree"] = cls.get("agree")
        row["provenance"] = (rep.canonical or {}).get("provenance")
        row["checks"] = rep.checks
        row["failures"] = len(rep.failures)
        row["skipped"] = rep.skipped
        rows.append(row)
    return rows


def summary_frame(reports: List[TheoremReport]) -> pd.DataFrame:
    return pd.DataFrame(summary_rows(reports))


def render_csv(reports: List[TheoremReport]) -> str:
    return summary_frame(reports).to_csv(index=False)


def campaign_basename(result: CampaignResult) -> str:
    return f"campaign_g{result.config.max_genus}_s{result.config.seed}"


def write_campaign(result: CampaignResult, out_dir: str, csv: bool = False) -> List[str]:
    """
    Write <out_dir>/campaign_g<genus>_s<seed>.json (and .csv)

    Returns:
        Paths written
    """
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, campaign_basename(result))
    written = []
    with open(base + ".json", "w", encoding="utf-8") as fh:
        fh.write(render_json(result.to_dict()))
    written.append(base + ".json")
    if csv:
        with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(result.reports))
        written.append(base + ".csv")
    for path in written:
        logger.info("wrote %s", path)
    return written
