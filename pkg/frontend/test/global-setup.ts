// Boot the real refactoring service for the integration tests; the UI is
// exercised against genuine engine behavior, no mocks.
import { spawn, ChildProcess } from "node:child_process";

const PORT = 7907;
export const BASE_URL = `http://127.0.0.1:${PORT}`;

let child: ChildProcess | null = null;

async function ready(): Promise<boolean> {
  try {
    const r = await fetch(`${BASE_URL}/session`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ source: "data Ping = Ping;" }),
    });
    return r.status === 200;
  } catch {
    return false;
  }
}

export async function setup(): Promise<void> {
  child = spawn("python3", ["-m", "minifun.cli", "serve", "--port", String(PORT)], {
    cwd: "..",
    stdio: "ignore",
  });
  for (let i = 0; i < 100; i++) {
    if (await ready()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("refactoring service did not come up");
}

export async function teardown(): Promise<void> {
  child?.kill();
}
