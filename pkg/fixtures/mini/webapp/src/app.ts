export function add(a: number, b: number): number {
  return a + b;
}

export function parseQuery(raw: string): string[] {
  return raw.split(" ").filter((part) => part.length > 0);
}
