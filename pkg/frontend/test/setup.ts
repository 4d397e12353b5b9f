/**
 * Global test setup: start the Python allocation service on a local port
 * so the integration tests exercise the real HTTP contract end to end.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { GlobalSetupContext } from "vitest/node";

const PORT = 8921;
const BASE_URL = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const resp = await fetch(`${BASE_URL}/v1/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up in time");
    await new Promise((r) => setTimeout(r, 250));
  }
}

export default async function setup({ provide }: GlobalSetupContext) {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "fundalloc.service:app", "--host", "127.0.0.1", "--port", String(PORT)],
    {
      env: {
        ...process.env,
        FUNDALLOC_COHORT_STORE: mkdtempSync(join(tmpdir(), "fundalloc-ui-test-")),
      },
      stdio: "ignore",
    },
  );
  await waitForHealth();
  provide("baseUrl", BASE_URL);

  return () => {
    server.kill();
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}
