package org.joda.time.chrono;

import org.joda.time.Chronology;
import org.joda.time.DateTimeZone;

/**
 * Wraps another chronology, applying a time zone to every field.
 */
public final class ZonedChronology extends Chronology {

    private final Chronology iBase;
    private final DateTimeZone iZone;

    public static ZonedChronology getInstance(Chronology base, DateTimeZone zone) {
        if (base == null) {
            throw new IllegalArgumentException("Must supply a chronology");
        }
        return new ZonedChronology(base, zone);
    }

    private ZonedChronology(Chronology base, DateTimeZone zone) {
        iBase = base;
        iZone = zone;
    }

    public DateTimeZone getZone() {
        return iZone;
    }

    public Chronology withZone(DateTimeZone zone) {
        return zone == iZone ? this : new ZonedChronology(iBase, zone);
    }

    public long getDateTimeMillis(int year, int monthOfYear, int dayOfMonth,
            int hourOfDay, int minuteOfHour, int secondOfMinute, int millisOfSecond) {
        long localInstant = LocalMillis.of(year, monthOfYear, dayOfMonth,
                hourOfDay, minuteOfHour, secondOfMinute, millisOfSecond);
        return localToUTC(localInstant);
    }

    private long localToUTC(long localInstant) {
        int offset = iZone.getOffsetFromLocal(localInstant);
        localInstant -= offset;
        if (offset != iZone.getOffset(localInstant)) {
            throw new IllegalArgumentException("Illegal instant due to time zone offset transition");
        }
        return localInstant;
    }

    static final class ZonedDateTimeField {
        private final DateTimeZone iZone;

        ZonedDateTimeField(DateTimeZone zone) {
            iZone = zone;
        }

        public int get(long instant) {
            long localInstant = iZone.convertUTCToLocal(instant);
            return (int) (localInstant / 3600000L);
        }

        public long set(long instant, int value) {
            long localInstant = iZone.convertUTCToLocal(instant);
            return iZone.convertLocalToUTC(localInstant + value, false);
        }
    }

    static final class LocalMillis {
        static long of(int year, int month, int day, int hour, int minute, int second, int millis) {
            long days = (year - 1970) * 365L + (month - 1) * 30L + (day - 1);
            return (((days * 24 + hour) * 60 + minute) * 60 + second) * 1000L + millis;
        }
    }
}
