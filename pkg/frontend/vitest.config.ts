import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the end-to-end test boots the Python gateway and flies the drone
    // task at accelerated time; well under the 2 min budget, but not unit-fast
    testTimeout: 120_000,
    hookTimeout: 30_000,
  },
});
