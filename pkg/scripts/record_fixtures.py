"""Record API fixtures for the frontend contract tests.

Builds a seeded workspace, runs the real HTTP service in-process, and saves
the dashboard response at three slider settings plus the feed listing.

Usage: python scripts/record_fixtures.py [output_dir]
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from credence.api import ApiService, create_app
from credence.model import Role
from credence.sim import benchmark_config, simulate

# Three slider settings chosen so the fixture population lands in all four
# quadrants somewhere across the set.
THRESHOLD_SETTINGS = [(0.7, 11.0), (0.6, 10.5), (0.5, 12.0)]


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "frontend" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)

    result = simulate(benchmark_config(7))
    workspace = result.workspace
    viewer = workspace.register_user("fixture-viewer", role=Role.DECISION_MAKER)

    client = TestClient(create_app(ApiService(workspace=workspace)))
    token = client.post("/v1/sessions", json={"user_id": viewer.user_id}).json()["token"]
    headers = {"Authorization": f"Bearer {token}"}

    for theta_b, theta_e in THRESHOLD_SETTINGS:
        resp = client.get("/v1/dashboard", params={"theta_b": theta_b, "theta_e": theta_e}, headers=headers)
        resp.raise_for_status()
        name = f"dashboard_tb{int(round(theta_b * 100)):03d}_te{int(round(theta_e * 10)):03d}.json"
        path = out_dir / name
        path.write_text(json.dumps(resp.json(), indent=2, sort_keys=True) + "\n")
        print(f"wrote {path} ({len(resp.json()['entries'])} entries)")

    resp = client.get("/v1/hypotheses", headers=headers)
    resp.raise_for_status()
    path = out_dir / "hypotheses.json"
    path.write_text(json.dumps(resp.json(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {path} ({len(resp.json()['hypotheses'])} cards)")


if __name__ == "__main__":
    main()
