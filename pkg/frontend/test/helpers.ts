import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function golden(rel: string): string {
  return join(here, "golden", rel);
}

export function tmpDir(): string {
  return mkdtempSync(join(tmpdir(), "figure-kit-"));
}

/** The six canonical jobs over the committed golden CSVs. */
export const GOLDEN_INPUTS: Record<string, string[]> = {
  fig1b: [golden("traj_r1/trajectories.csv"), golden("traj_r3/trajectories.csv")],
  fig1c: [golden("phase_r1/phase_space.csv")],
  fig1d: [golden("traj_r1/rho_grid.csv"), golden("traj_r1/trajectories.csv")],
  fig2: [golden("scan_r18/tunnel_scan.csv"), golden("ptot_r18/ptot_scan.csv")],
  fig3: [golden("ptot_full/ptot_scan.csv")],
  fig4: [golden("exit_r12/exit_traj.csv")],
};
