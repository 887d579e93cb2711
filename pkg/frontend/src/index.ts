export { FAMILY_COLUMNS, FAMILY_FILES, SchemaError, parseFamilyCsv } from "./schema.js";
export type { Family, Row } from "./schema.js";
export { FIGURES } from "./figures.js";
export type { FigureSpec, PanelSpec } from "./figures.js";
export { render } from "./render.js";
export { main } from "./cli.js";
