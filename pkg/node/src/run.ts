/** Blocking subprocess runner for the chairkit CLI. */

import { spawnSync } from "node:child_process";

/** stderr line format used by the CLI for every failure. */
const ERROR_LINE = /^error\[([a-z-]+)\]: (.*)$/m;

/** Raised when the CLI exits nonzero; carries the CLI's error code. */
export class ChairkitError extends Error {
  /** Machine-parseable code from the error line ("io", "config", ...). */
  readonly code: string;
  readonly exitCode: number;
  readonly stderr: string;

  constructor(code: string, message: string, exitCode: number, stderr: string) {
    super(message);
    this.name = "ChairkitError";
    this.code = code;
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

export interface RunResult {
  stdout: string;
  stderr: string;
}

function cliCommand(cliPath?: string): string {
  return cliPath ?? process.env.CHAIRKIT_CLI ?? "chairkit";
}

/**
 * Run one CLI invocation to completion and return its output, throwing
 * a ChairkitError when it fails.
 */
export function runCli(
  args: string[],
  options: { stdin?: string; cliPath?: string } = {},
): RunResult {
  const command = cliCommand(options.cliPath);
  const proc = spawnSync(command, args, {
    input: options.stdin,
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new ChairkitError(
      "io",
      `failed to launch ${command}: ${proc.error.message}`,
      -1,
      "",
    );
  }
  if (proc.status !== 0) {
    const match = ERROR_LINE.exec(proc.stderr);
    const code = match ? match[1]! : proc.status === 2 ? "io" : "error";
    const message = match ? match[2]! : proc.stderr.trim() || `exit ${proc.status}`;
    throw new ChairkitError(code, message, proc.status ?? -1, proc.stderr);
  }
  return { stdout: proc.stdout, stderr: proc.stderr };
}
