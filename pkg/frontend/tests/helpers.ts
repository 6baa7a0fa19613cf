/** Spawns the backing service once per test file. */

import { ChildProcess, spawn } from "node:child_process";

export interface Backend {
  base: string;
  proc: ChildProcess;
}

export async function startBackend(): Promise<Backend> {
  const port = 8900 + Math.floor(Math.random() * 800);
  const proc = spawn(
    "python3",
    ["-m", "morseflow.cli", "serve", "--port", String(port), "--host", "127.0.0.1"],
    { stdio: ["ignore", "pipe", "pipe"], cwd: process.cwd() },
  );
  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 20000;
  for (;;) {
    try {
      const res = await fetch(`${base}/session`, { method: "POST" });
      if (res.ok) {
        await res.json();
        break;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error("backend did not start in time");
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  return { base, proc };
}

export function stopBackend(backend: Backend | null): void {
  backend?.proc.kill();
}
