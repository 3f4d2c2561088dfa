#!/usr/bin/env node
// cli.ts — batch entry point: point it at run manifests, get a table or
// an SVG. Exit codes: 0 ok, 1 file/schema problems, 64 usage.

import { realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { plotBounds, plotCoverage } from "./plots.js";
import { groupRuns, loadRuns } from "./runset.js";
import { SchemaError, UsageError } from "./schema.js";
import { completionTable } from "./table.js";

const USAGE = `usage: volex-analysis <command> [options] manifest.json...

commands:
  table      completion robot-iterations per group (text to stdout)
  coverage   mean coverage curves with error bands (SVG)
  bounds     mean best-ratio curves per planner (SVG)

options:
  -o, --out PATH        output file (SVG for plots, CSV for table)
      --baseline LABEL  table ratios relative to this group label
`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string", short: "o" },
        baseline: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    process.stderr.write(`volex-analysis: ${(err as Error).message}\n`);
    return 64;
  }
  const { values, positionals } = parsed;
  if (values.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  const [command, ...manifests] = positionals;
  if (!command || !["table", "coverage", "bounds"].includes(command)) {
    process.stderr.write(USAGE);
    return 64;
  }
  if (manifests.length === 0) {
    process.stderr.write("volex-analysis: no manifests given\n");
    return 64;
  }

  try {
    const runset = groupRuns(loadRuns(manifests));
    if (command === "table") {
      const table = completionTable(runset, { baseline: values.baseline });
      process.stdout.write(table.text + "\n");
      if (values.out) {
        writeFileSync(values.out, table.csv);
        process.stdout.write(`wrote ${values.out}\n`);
      }
      return 0;
    }
    const out = values.out ?? `${command}.svg`;
    const plot = command === "coverage"
      ? plotCoverage(runset, out)
      : plotBounds(runset, out);
    process.stdout.write(
      `wrote ${plot.path} (${plot.series.length} series)\n`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`volex-analysis: ${err.message}\n`);
      return 64;
    }
    if (err instanceof SchemaError
        || (err as NodeJS.ErrnoException).code !== undefined) {
      process.stderr.write(`volex-analysis: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

// Run only as a script, not when imported by tests; realpath so the
// npm bin symlink still counts as "this file".
const entry = process.argv[1];
if (entry !== undefined
    && import.meta.url === pathToFileURL(realpathSync(entry)).href) {
  process.exit(main(process.argv.slice(2)));
}
