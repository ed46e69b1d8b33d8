import { runCurves } from "./cli.js";

process.exitCode = await runCurves(process.argv.slice(2));
