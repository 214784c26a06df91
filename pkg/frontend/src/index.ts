export { readTable, parseTable, readEvents, requireColumns, SchemaError } from "./data.js";
export { eigSweep, projectionXyYz, orbit3d, apsisCurve } from "./figures.js";
export { main, render } from "./cli.js";
