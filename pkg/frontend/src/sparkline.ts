/** Minimal sparkline geometry: a series becomes SVG polyline points. */

export function sparklinePoints(
  values: number[],
  width: number,
  height: number,
  pad = 2,
): string {
  if (values.length === 0) return "";
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const step = values.length > 1 ? (width - 2 * pad) / (values.length - 1) : 0;
  return values
    .map((value, index) => {
      const x = pad + index * step;
      const y = height - pad - ((value - lo) / span) * (height - 2 * pad);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export function renderSparkline(values: number[], label: string): string {
  const width = 180;
  const height = 36;
  const points = sparklinePoints(values, width, height);
  const latest = values.length ? values[values.length - 1] : null;
  const shown = latest === null ? "" : Number.isInteger(latest) ? `${latest}` : latest.toFixed(2);
  return (
    `<figure class="spark"><figcaption>${label} <b>${shown}</b></figcaption>` +
    `<svg width="${width}" height="${height}"><polyline points="${points}"/></svg></figure>`
  );
}
