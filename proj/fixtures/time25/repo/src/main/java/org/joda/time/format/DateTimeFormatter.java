package org.joda.time.format;

import org.joda.time.DateTimeZone;

public class DateTimeFormatter {

    private final DateTimeZone iZone;

    private DateTimeFormatter(DateTimeZone zone) {
        iZone = zone;
    }

    public static DateTimeFormatter isoDateTime() {
        return new DateTimeFormatter(null);
    }

    public DateTimeFormatter withZone(DateTimeZone zone) {
        return new DateTimeFormatter(zone);
    }

    public String print(long instant) {
        DateTimeZone zone = iZone == null ? DateTimeZone.getDefault() : iZone;
        int offset = zone.getOffset(instant);
        StringBuilder buf = new StringBuilder();
        printTo(buf, instant + offset, offset);
        return buf.toString();
    }

    public long parseMillis(String text) {
        throw new UnsupportedOperationException("Parsing not supported: " + text);
    }

    private void printTo(StringBuilder buf, long localInstant, int offset) {
        buf.append(localInstant);
        buf.append(offset < 0 ? '-' : '+');
        buf.append(Math.abs(offset) / 3600000);
    }
}
