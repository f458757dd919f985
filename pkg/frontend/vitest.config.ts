import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    environmentOptions: {
      happyDOM: { url: "http://localhost/" },
    },
    include: ["tests/**/*.test.ts"],
  },
});
