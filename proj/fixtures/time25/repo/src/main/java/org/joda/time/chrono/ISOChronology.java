package org.joda.time.chrono;

import java.util.concurrent.ConcurrentHashMap;

import org.joda.time.Chronology;
import org.joda.time.DateTimeZone;

public final class ISOChronology extends Chronology {

    private static final ConcurrentHashMap<DateTimeZone, ISOChronology> cCache =
            new ConcurrentHashMap<DateTimeZone, ISOChronology>();

    private final DateTimeZone iZone;

    private ISOChronology(DateTimeZone zone) {
        iZone = zone;
    }

    public static ISOChronology getInstance(DateTimeZone zone) {
        if (zone == null) {
            zone = DateTimeZone.getDefault();
        }
        ISOChronology chrono = cCache.get(zone);
        if (chrono == null) {
            chrono = new ISOChronology(zone);
            ISOChronology oldChrono = cCache.putIfAbsent(zone, chrono);
            if (oldChrono != null) {
                chrono = oldChrono;
            }
        }
        return chrono;
    }

    public DateTimeZone getZone() {
        return iZone;
    }

    public Chronology withZone(DateTimeZone zone) {
        return zone == iZone ? this : getInstance(zone);
    }

    public long getDateTimeMillis(int year, int monthOfYear, int dayOfMonth,
            int hourOfDay, int minuteOfHour, int secondOfMinute, int millisOfSecond) {
        return ZonedChronology.getInstance(this, iZone).getDateTimeMillis(
                year, monthOfYear, dayOfMonth, hourOfDay, minuteOfHour, secondOfMinute, millisOfSecond);
    }
}
