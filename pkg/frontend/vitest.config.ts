import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 30_000,
    // the e2e spec spawns one shared service; keep files sequential
    fileParallelism: false,
  },
});
