import { runBars } from "./cli.js";

process.exitCode = await runBars(process.argv.slice(2));
