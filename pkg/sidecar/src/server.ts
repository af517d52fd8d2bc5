/** Entry point: load configuration from the environment and listen. */

import { buildApp } from "./app";
import { ConfigError, loadConfig } from "./config";

function main(): void {
  let config;
  try {
    config = loadConfig();
  } catch (err) {
    if (err instanceof ConfigError) {
      console.error(`scorer-sidecar: ${err.message}`);
      process.exit(2);
    }
    throw err;
  }
  const app = buildApp(config);
  const server = app.listen(config.port, config.host, () => {
    console.log(
      `scorer-sidecar listening on http://${config.host}:${config.port} ` +
        `(kinds: ${config.kinds.join(", ")})`
    );
  });
  for (const signal of ["SIGINT", "SIGTERM"] as const) {
    process.on(signal, () => {
      server.close(() => process.exit(0));
    });
  }
}

main();
