package main

import "strings"

// Parse splits a raw query into fields.
func Parse(raw string) []string {
	return strings.Fields(raw)
}

func parseAll(lines []string) [][]string {
	out := make([][]string, 0, len(lines))
	for _, line := range lines {
		out = append(out, Parse(line))
	}
	return out
}
