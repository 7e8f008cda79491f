import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // tfjs keeps WebGL-ish global state; a single fork avoids cross-test leaks
    pool: "forks",
    poolOptions: { forks: { singleFork: true } },
  },
});
